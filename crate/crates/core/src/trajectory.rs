use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Angle, Point2};

/// Constant-speed polyline path with piecewise-constant headings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    /// Time stamps, starting at 0 and nondecreasing.
    pub times: Vec<f64>,
    pub points: Vec<Point2>,
    /// Heading of segment `k`, from `points[k]` to `points[k + 1]`.
    pub headings: Vec<Angle>,
}

fn check_speed(speed: f64) -> Result<()> {
    if !(speed.is_finite() && speed > 0.0) {
        return Err(Error::argument(format!(
            "speed must be positive, got {speed}"
        )));
    }
    Ok(())
}

impl Trajectory {
    /// Traverse `points` in order at `speed`. Repeated points are dropped.
    pub fn from_points(points: &[Point2], speed: f64) -> Result<Self> {
        check_speed(speed)?;
        let mut kept: Vec<Point2> = Vec::with_capacity(points.len());
        for &p in points {
            if !p.is_finite() {
                return Err(Error::domain("non-finite trajectory point"));
            }
            if kept.last() != Some(&p) {
                kept.push(p);
            }
        }
        if kept.len() < 2 {
            return Err(Error::argument("a trajectory needs two distinct points"));
        }
        let mut times = vec![0.0];
        let mut headings = Vec::with_capacity(kept.len() - 1);
        for w in kept.windows(2) {
            let step = w[1] - w[0];
            times.push(times.last().unwrap() + step.norm() / speed);
            headings.push(Angle::from_radians(step.angle()));
        }
        Ok(Trajectory {
            times,
            points: kept,
            headings,
        })
    }

    /// Chain segments of duration `dt` at `speed` from `start`.
    pub fn from_headings(start: Point2, headings: &[Angle], dt: f64, speed: f64) -> Result<Self> {
        check_speed(speed)?;
        if headings.is_empty() || !(dt.is_finite() && dt > 0.0) {
            return Err(Error::argument(
                "need at least one heading and a positive time step",
            ));
        }
        let mut points = Vec::with_capacity(headings.len() + 1);
        points.push(start);
        let mut p = start;
        for h in headings {
            p += h.unit() * (speed * dt);
            points.push(p);
        }
        let times = (0..=headings.len()).map(|k| k as f64 * dt).collect();
        Ok(Trajectory {
            times,
            points,
            headings: headings.to_vec(),
        })
    }

    /// Check the shape invariants and constant-speed consistency.
    pub fn validate(&self, speed: f64) -> Result<()> {
        check_speed(speed)?;
        let n = self.points.len();
        if n < 2 || self.times.len() != n || self.headings.len() != n - 1 {
            return Err(Error::argument(
                "trajectory arrays have inconsistent lengths",
            ));
        }
        if self.times[0] != 0.0 {
            return Err(Error::argument("trajectory must start at t = 0"));
        }
        for k in 0..n - 1 {
            let dt = self.times[k + 1] - self.times[k];
            if dt < 0.0 {
                return Err(Error::argument(format!("time decreases at index {k}")));
            }
            let step = self.points[k + 1] - self.points[k];
            let expected = speed * dt;
            if (step.norm() - expected).abs() > 1e-9 * expected.max(f64::MIN_POSITIVE) {
                return Err(Error::argument(format!(
                    "segment {k} has length {} but speed * dt = {expected}",
                    step.norm()
                )));
            }
        }
        Ok(())
    }

    pub fn duration(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn start(&self) -> Point2 {
        self.points[0]
    }

    pub fn end(&self) -> Point2 {
        *self.points.last().expect("nonempty trajectory")
    }

    pub fn length(&self) -> f64 {
        self.points.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }

    /// `n` points spaced uniformly in arc length, endpoints included.
    pub fn resample_uniform(&self, n: usize) -> Result<Vec<Point2>> {
        if n < 2 {
            return Err(Error::argument("resampling needs at least two points"));
        }
        let mut cumulative = vec![0.0];
        for w in self.points.windows(2) {
            cumulative.push(cumulative.last().unwrap() + (w[1] - w[0]).norm());
        }
        let total = *cumulative.last().unwrap();
        let mut out = Vec::with_capacity(n);
        let mut seg = 0;
        for i in 0..n {
            let s = total * i as f64 / (n - 1) as f64;
            while seg + 2 < cumulative.len() && cumulative[seg + 1] < s {
                seg += 1;
            }
            let len = cumulative[seg + 1] - cumulative[seg];
            let f = if len > 0.0 {
                ((s - cumulative[seg]) / len).clamp(0.0, 1.0)
            } else {
                0.0
            };
            out.push(self.points[seg].lerp(self.points[seg + 1], f));
        }
        *out.last_mut().unwrap() = self.end();
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn from_points_times_and_headings() {
        let pts = [
            Point2::new(0.0, 0.0),
            Point2::new(3.0, 0.0),
            Point2::new(3.0, 0.0),
            Point2::new(3.0, 4.0),
        ];
        let t = Trajectory::from_points(&pts, 2.0).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.times, vec![0.0, 1.5, 3.5]);
        assert_eq!(t.headings[1].radians(), FRAC_PI_2);
        t.validate(2.0).unwrap();
        assert!(t.validate(1.0).is_err());
        assert!(Trajectory::from_points(&pts[..1], 1.0).is_err());
    }

    #[test]
    fn chained_headings_are_consistent() {
        let hs: Vec<Angle> = (0..10)
            .map(|k| Angle::from_radians(0.1 * k as f64))
            .collect();
        let t = Trajectory::from_headings(Point2::new(1.0, -1.0), &hs, 0.25, 0.9).unwrap();
        t.validate(0.9).unwrap();
        assert!((t.duration() - 2.5).abs() < 1e-15);
        assert!((t.length() - 0.9 * 2.5).abs() < 1e-12);
    }

    #[test]
    fn uniform_resampling() {
        let pts = [
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 3.0),
        ];
        let t = Trajectory::from_points(&pts, 1.0).unwrap();
        let r = t.resample_uniform(5).unwrap();
        assert_eq!(r[0], pts[0]);
        assert_eq!(r[4], pts[2]);
        assert!((r[1] - Point2::new(1.0, 0.0)).norm() < 1e-12);
        assert!((r[2] - Point2::new(1.0, 1.0)).norm() < 1e-12);
    }
}
