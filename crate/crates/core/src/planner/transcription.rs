//! Uniform-time transcription: variables are the `M = n_nodes - 1` segment
//! headings followed by the terminal time. Nodes are chained from the start.

use crate::geometry::{Angle, Point2};
use crate::threat::{ClearanceGradient, Threat};

use super::sqp::{Evaluation, Matrix, Nlp};

/// Samples per segment before refining the clearance minimum.
const SEGMENT_SAMPLES: usize = 12;
const GOLDEN_ITERATIONS: usize = 40;

/// What the inequality constraints keep the path out of.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Obstacle {
    EngagementZone,
    /// Heading-independent keep-out disks; used to untangle blocked warm starts.
    KeepOutDisk,
}

pub(crate) struct Transcription<'a> {
    pub obstacle: Obstacle,
    pub start: Point2,
    pub goal: Point2,
    pub speed: f64,
    pub segments: usize,
    pub threats: &'a [Threat],
    /// Lower bound on the terminal time.
    pub min_time: f64,
}

/// Smallest clearance along one segment for one threat.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SegmentMin {
    pub tau: f64,
    pub point: Point2,
    pub clearance: f64,
}

impl Transcription<'_> {
    pub fn dt(&self, x: &[f64]) -> f64 {
        x[self.segments] / self.segments as f64
    }

    pub fn nodes(&self, x: &[f64]) -> Vec<Point2> {
        let step = self.speed * self.dt(x);
        let mut nodes = Vec::with_capacity(self.segments + 1);
        let mut p = self.start;
        nodes.push(p);
        for &psi in &x[..self.segments] {
            p += Angle::from_radians(psi).unit() * step;
            nodes.push(p);
        }
        nodes
    }

    fn clearance(&self, threat: &Threat, p: Point2, heading: Angle) -> f64 {
        match self.obstacle {
            // A point exactly on the threat has no bearing; treat it as deep inside.
            Obstacle::EngagementZone => threat
                .clearance(p, heading)
                .unwrap_or(-threat.length_scale()),
            Obstacle::KeepOutDisk => (p - threat.position()).norm() - threat.keep_out_radius(),
        }
    }

    fn clearance_gradient(&self, threat: &Threat, p: Point2, heading: Angle) -> ClearanceGradient {
        let zero = ClearanceGradient {
            position: Point2::ORIGIN,
            heading: 0.0,
        };
        match self.obstacle {
            Obstacle::EngagementZone => threat.clearance_gradient(p, heading).unwrap_or(zero),
            Obstacle::KeepOutDisk => {
                let r = p - threat.position();
                let d = r.norm();
                if d > 0.0 {
                    ClearanceGradient {
                        position: r * (1.0 / d),
                        heading: 0.0,
                    }
                } else {
                    zero
                }
            }
        }
    }

    /// Clearance along `a → b` flown at `heading`, minimized over the segment.
    pub fn segment_min(&self, threat: &Threat, a: Point2, b: Point2, heading: Angle) -> SegmentMin {
        let eval = |tau: f64| self.clearance(threat, a.lerp(b, tau), heading);
        let samples: Vec<f64> = (0..=SEGMENT_SAMPLES)
            .map(|i| eval(i as f64 / SEGMENT_SAMPLES as f64))
            .collect();
        let (i_min, _) = samples
            .iter()
            .enumerate()
            .min_by(|x, y| x.1.total_cmp(y.1))
            .expect("samples");
        let h = 1.0 / SEGMENT_SAMPLES as f64;
        let mut lo = (i_min as f64 - 1.0).max(0.0) * h;
        let mut hi = (i_min as f64 + 1.0).min(SEGMENT_SAMPLES as f64) * h;
        const INV_PHI: f64 = 0.618_033_988_749_894_8;
        let mut x1 = hi - INV_PHI * (hi - lo);
        let mut x2 = lo + INV_PHI * (hi - lo);
        let (mut f1, mut f2) = (eval(x1), eval(x2));
        for _ in 0..GOLDEN_ITERATIONS {
            if f1 <= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - INV_PHI * (hi - lo);
                f1 = eval(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + INV_PHI * (hi - lo);
                f2 = eval(x2);
            }
        }
        let mut best = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
        for (tau, value) in [
            (0.0, samples[0]),
            (1.0, samples[SEGMENT_SAMPLES]),
            (i_min as f64 * h, samples[i_min]),
        ] {
            if value < best.1 {
                best = (tau, value);
            }
        }
        SegmentMin {
            tau: best.0,
            point: a.lerp(b, best.0),
            clearance: best.1,
        }
    }

    /// Per-threat, per-segment minimum clearances, threat-major.
    pub fn segment_minima(&self, x: &[f64]) -> Vec<SegmentMin> {
        let nodes = self.nodes(x);
        let mut out = Vec::with_capacity(self.threats.len() * self.segments);
        for threat in self.threats {
            for k in 0..self.segments {
                out.push(self.segment_min(
                    threat,
                    nodes[k],
                    nodes[k + 1],
                    Angle::from_radians(x[k]),
                ));
            }
        }
        out
    }
}

impl Nlp for Transcription<'_> {
    fn dim(&self) -> usize {
        self.segments + 1
    }

    fn evaluate(&self, x: &[f64], jacobian: bool) -> Evaluation {
        let m = self.segments;
        let n = m + 1;
        let t_f = x[m];
        let dt = self.dt(x);
        let step = self.speed * dt;
        let nodes = self.nodes(x);
        let end = nodes[m];

        let mut grad = vec![0.0; n];
        grad[m] = 1.0;
        let c_eq = vec![end.x - self.goal.x, end.y - self.goal.y];

        let minima = self.segment_minima(x);
        let c_in: Vec<f64> = minima.iter().map(|s| s.clearance).collect();

        let (mut j_eq, mut j_in) = (Matrix::zeros(0, n), Matrix::zeros(0, n));
        if jacobian {
            // d(node)/d(psi_j) for every later node.
            let lateral: Vec<Point2> = x[..m]
                .iter()
                .map(|&psi| Angle::from_radians(psi).unit().perp() * step)
                .collect();
            j_eq = Matrix::zeros(2, n);
            for (j, l) in lateral.iter().enumerate() {
                j_eq.row_mut(0)[j] = l.x;
                j_eq.row_mut(1)[j] = l.y;
            }
            let stretch = (end - self.start) * (1.0 / t_f);
            j_eq.row_mut(0)[m] = stretch.x;
            j_eq.row_mut(1)[m] = stretch.y;

            j_in = Matrix::zeros(minima.len(), n);
            for (row, s) in minima.iter().enumerate() {
                let threat = &self.threats[row / m];
                let k = row % m;
                let g = self.clearance_gradient(threat, s.point, Angle::from_radians(x[k]));
                let r = j_in.row_mut(row);
                for (j, l) in lateral.iter().take(k).enumerate() {
                    r[j] = g.position.dot(*l);
                }
                r[k] = g.position.dot(lateral[k]) * s.tau + g.heading;
                r[m] = g.position.dot(s.point - self.start) / t_f;
            }
        }
        Evaluation {
            f: t_f,
            grad,
            c_eq,
            c_in,
            j_eq,
            j_in,
        }
    }

    fn lower_bounds(&self) -> Vec<f64> {
        let mut lo = vec![f64::NEG_INFINITY; self.segments + 1];
        lo[self.segments] = self.min_time;
        lo
    }

    fn trust_radius(&self, x: &[f64]) -> Vec<f64> {
        let mut r = vec![0.5; self.segments + 1];
        r[self.segments] = 0.25 * x[self.segments];
        r
    }
}
