use rand::Rng;
use serde::{Deserialize, Serialize};

use super::geometry::Point2;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    pub t_s: f64,
    pub x_m: f64,
    pub y_m: f64,
}

impl Waypoint {
    pub fn position(&self) -> Point2 {
        Point2::new(self.x_m, self.y_m)
    }
}

/// Piecewise-linear path at constant speed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub waypoints: Vec<Waypoint>,
    pub speed_mps: f64,
}

/// Relative tolerance on per-segment speed.
const SPEED_TOLERANCE: f64 = 0.01;

impl Trajectory {
    /// Builds a trajectory that starts at `t0_s` and visits `points` at `speed_mps`.
    pub fn through(points: &[Point2], speed_mps: f64, t0_s: f64) -> Result<Self> {
        let mut waypoints = Vec::with_capacity(points.len());
        let mut t = t0_s;
        for (i, p) in points.iter().enumerate() {
            if i > 0 {
                t += points[i - 1].distance(*p) / speed_mps;
            }
            waypoints.push(Waypoint {
                t_s: t,
                x_m: p.x,
                y_m: p.y,
            });
        }
        let traj = Self {
            waypoints,
            speed_mps,
        };
        traj.validate()?;
        Ok(traj)
    }

    pub fn validate(&self) -> Result<()> {
        if self.waypoints.len() < 2 {
            return Err(Error::Config("trajectory needs at least two waypoints".into()));
        }
        if !(self.speed_mps > 0.0) {
            return Err(Error::Config("trajectory speed must be positive".into()));
        }
        for pair in self.waypoints.windows(2) {
            let dt = pair[1].t_s - pair[0].t_s;
            if !(dt > 0.0) {
                return Err(Error::Config(format!(
                    "waypoint times must increase strictly ({} then {})",
                    pair[0].t_s, pair[1].t_s
                )));
            }
            let speed = pair[0].position().distance(pair[1].position()) / dt;
            if (speed - self.speed_mps).abs() > SPEED_TOLERANCE * self.speed_mps {
                return Err(Error::Config(format!(
                    "segment starting at t = {} s moves at {:.4} m/s, expected {:.4}",
                    pair[0].t_s, speed, self.speed_mps
                )));
            }
        }
        Ok(())
    }

    pub fn start_time(&self) -> f64 {
        self.waypoints.first().map_or(0.0, |w| w.t_s)
    }

    pub fn end_time(&self) -> f64 {
        self.waypoints.last().map_or(0.0, |w| w.t_s)
    }

    pub fn position_at(&self, t_s: f64) -> Result<Point2> {
        let (start, end) = (self.start_time(), self.end_time());
        if !(t_s >= start && t_s <= end) {
            return Err(Error::OutOfRange { t_s, start, end });
        }
        // first waypoint with time >= t
        let idx = self.waypoints.partition_point(|w| w.t_s < t_s);
        if idx == 0 {
            return Ok(self.waypoints[0].position());
        }
        let (a, b) = (&self.waypoints[idx - 1], &self.waypoints[idx]);
        let frac = (t_s - a.t_s) / (b.t_s - a.t_s);
        Ok(a.position().lerp(b.position(), frac))
    }

    /// Random-waypoint walk inside `bounds` lasting at least `duration_s`,
    /// keeping every segment at least `keep_out_m` away from `keep_out_center`.
    pub fn random_walk<R: Rng + ?Sized>(
        rng: &mut R,
        bounds: (Point2, Point2),
        keep_out_center: Point2,
        keep_out_m: f64,
        speed_mps: f64,
        duration_s: f64,
    ) -> Result<Self> {
        let (lo, hi) = bounds;
        let sample = |rng: &mut R| {
            Point2::new(rng.random_range(lo.x..hi.x), rng.random_range(lo.y..hi.y))
        };
        let mut points = Vec::new();
        let mut current = loop {
            let p = sample(rng);
            if p.distance(keep_out_center) >= keep_out_m {
                break p;
            }
        };
        points.push(current);
        let mut elapsed = 0.0;
        let mut attempts = 0usize;
        while elapsed < duration_s {
            attempts += 1;
            if attempts > 100_000 {
                return Err(Error::Config(
                    "could not place waypoints outside the keep-out zone".into(),
                ));
            }
            let next = sample(rng);
            let len = current.distance(next);
            // very short hops produce near-stationary robots
            if len < 0.5 || keep_out_center.distance_to_segment(current, next) < keep_out_m {
                continue;
            }
            elapsed += len / speed_mps;
            points.push(next);
            current = next;
        }
        Self::through(&points, speed_mps, 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn square() -> Trajectory {
        let pts = [
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ];
        Trajectory::through(&pts, 0.2, 0.0).unwrap()
    }

    #[test]
    fn waypoint_and_midpoint() {
        let tr = square();
        assert_eq!(tr.position_at(5.0).unwrap(), Point2::new(1.0, 0.0));
        assert_eq!(tr.position_at(0.0).unwrap(), Point2::new(0.0, 0.0));
        let mid = tr.position_at(7.5).unwrap();
        assert!((mid.x - 1.0).abs() < 1e-12 && (mid.y - 0.5).abs() < 1e-12);
    }

    #[test]
    fn out_of_range() {
        let tr = square();
        assert!(matches!(tr.position_at(-0.1), Err(Error::OutOfRange { .. })));
        assert!(tr.position_at(15.01).is_err());
    }

    #[test]
    fn rejects_uneven_speed() {
        let tr = Trajectory {
            waypoints: vec![
                Waypoint { t_s: 0.0, x_m: 0.0, y_m: 0.0 },
                Waypoint { t_s: 1.0, x_m: 0.2, y_m: 0.0 },
                Waypoint { t_s: 2.0, x_m: 0.5, y_m: 0.0 },
            ],
            speed_mps: 0.2,
        };
        assert!(tr.validate().is_err());
    }

    #[test]
    fn random_walk_respects_keep_out() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let center = Point2::new(2.0, 2.0);
        let tr = Trajectory::random_walk(
            &mut rng,
            (Point2::new(0.0, 0.0), Point2::new(4.0, 4.0)),
            center,
            0.7,
            0.2,
            60.0,
        )
        .unwrap();
        assert!(tr.end_time() >= 60.0);
        for w in tr.waypoints.windows(2) {
            assert!(center.distance_to_segment(w[0].position(), w[1].position()) >= 0.7);
        }
    }

    // independent re-interpolation: linear scan for the bracketing segment
    fn reference_position(tr: &Trajectory, t: f64) -> Point2 {
        for w in tr.waypoints.windows(2) {
            if t >= w[0].t_s && t <= w[1].t_s {
                let s = (t - w[0].t_s) / (w[1].t_s - w[0].t_s);
                return Point2::new(
                    w[0].x_m * (1.0 - s) + w[1].x_m * s,
                    w[0].y_m * (1.0 - s) + w[1].y_m * s,
                );
            }
        }
        unreachable!()
    }

    proptest! {
        #[test]
        fn matches_reference_interpolation(frac in 0.0f64..=1.0) {
            let tr = square();
            let t = tr.end_time() * frac;
            let p = tr.position_at(t).unwrap();
            let q = reference_position(&tr, t);
            prop_assert!((p.x - q.x).abs() <= 1e-12 && (p.y - q.y).abs() <= 1e-12);
        }
    }
}
