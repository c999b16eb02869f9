use std::f64::consts::PI;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use ezpath::oracle::{pursuit_capture_possible, turret_neutralization_possible};
use ezpath::pursuit::{rho, sample_boundary, signed_clearance};
use ezpath::turret::turret_signed_clearance;
use ezpath::{Angle, Point2, PursuerThreat, TurretThreat};

fn poses(n: usize) -> Vec<(Point2, Angle)> {
    (0..n)
        .map(|k| {
            let s = k as f64 / n as f64;
            let p = Point2::new(
                0.1 + 2.5 * (7.0 * s).cos() * s,
                0.07 + 2.5 * (11.0 * s).sin(),
            );
            (p, Angle::from_radians(2.0 * PI * (13.0 * s).fract() - PI))
        })
        .collect()
}

fn pursuit(c: &mut Criterion) {
    let slow = PursuerThreat::new(Point2::ORIGIN, 0.7, 1.0, 0.25).unwrap();
    let fast = PursuerThreat::new(Point2::ORIGIN, 1.5, 1.0, 0.25).unwrap();
    let xis: Vec<Angle> = (0..256)
        .map(|k| Angle::from_radians(-PI + 2.0 * PI * k as f64 / 255.0))
        .collect();
    c.bench_function("rho/slow x256", |b| {
        b.iter(|| xis.iter().map(|&xi| rho(xi, black_box(&slow))).sum::<f64>())
    });
    c.bench_function("rho/fast x256", |b| {
        b.iter(|| xis.iter().map(|&xi| rho(xi, black_box(&fast))).sum::<f64>())
    });
    c.bench_function("pursuit/sample_boundary 360", |b| {
        b.iter(|| sample_boundary(black_box(&slow), Angle::from_radians(0.3), 360).unwrap())
    });
    let ps = poses(256);
    c.bench_function("pursuit/signed_clearance x256", |b| {
        b.iter(|| {
            ps.iter()
                .map(|&(p, h)| signed_clearance(p, h, black_box(&slow)).unwrap_or(0.0))
                .sum::<f64>()
        })
    });
    c.bench_function("pursuit/oracle x256", |b| {
        b.iter(|| {
            ps.iter()
                .filter(|&&(p, h)| pursuit_capture_possible(p, h, black_box(&slow)).unwrap())
                .count()
        })
    });
}

fn turret(c: &mut Criterion) {
    let t = TurretThreat::new(Point2::ORIGIN, PI / 6.0, 0.5, 1.0).unwrap();
    let ps = poses(256);
    c.bench_function("turret/signed_clearance x256", |b| {
        b.iter(|| {
            ps.iter()
                .map(|&(p, h)| turret_signed_clearance(p, h, black_box(&t)).unwrap_or(0.0))
                .sum::<f64>()
        })
    });
    c.bench_function("turret/oracle x256", |b| {
        b.iter(|| {
            ps.iter()
                .filter(|&&(p, h)| {
                    turret_neutralization_possible(p, h, black_box(&t)).unwrap_or(false)
                })
                .count()
        })
    });
}

criterion_group!(benches, pursuit, turret);
criterion_main!(benches);
