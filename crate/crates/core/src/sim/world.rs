use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{DistanceMetric, SimParams};
use crate::config::NetworkConfig;

pub type Point = [f64; 2];

/// State of one Monte Carlo trial.
#[derive(Debug, Clone)]
pub struct SimWorld {
    /// Side length `L` of the square `[0, L]^2`.
    pub side: f64,
    pub mu_positions: Vec<Point>,
    pub src_positions: Vec<Point>,
    pub bs_positions: Vec<Point>,
    /// Set once an MU has received the packet; never cleared within a trial.
    pub covered: Vec<bool>,
    /// Heading (radians) used in the last random-direction step.
    pub mu_headings: Vec<f64>,
    pub src_headings: Vec<f64>,
    pub speed: f64,
    pub slot_period: f64,
    pub distance: DistanceMetric,
    pub rng_seed: u64,
    pub stream: u64,
    pub(crate) rng: ChaCha8Rng,
}

impl SimWorld {
    pub fn covered_count(&self) -> u32 {
        self.covered.iter().filter(|&&c| c).count() as u32
    }

    /// Squared distance under the world's metric.
    pub fn dist2(&self, a: Point, b: Point) -> f64 {
        let mut dx = (a[0] - b[0]).abs();
        let mut dy = (a[1] - b[1]).abs();
        if self.distance == DistanceMetric::Torus {
            dx = dx.min(self.side - dx);
            dy = dy.min(self.side - dy);
        }
        dx * dx + dy * dy
    }

    pub(crate) fn uniform_point(&mut self) -> Point {
        let side = self.side;
        [
            self.rng.random::<f64>() * side,
            self.rng.random::<f64>() * side,
        ]
    }
}

/// Places every node class i.i.d. uniformly on the square.
///
/// `(seed, stream)` fully determine the world and everything drawn from it.
pub fn place_nodes(
    cfg: &NetworkConfig<f64>,
    params: &SimParams,
    seed: u64,
    stream: u64,
) -> SimWorld {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let n_mu = cfg.n_mu as usize;
    let n_src = cfg.n_src as usize;
    let mut world = SimWorld {
        side: cfg.side(),
        mu_positions: Vec::with_capacity(n_mu),
        src_positions: Vec::with_capacity(n_src),
        bs_positions: Vec::with_capacity(cfg.n_bs as usize),
        covered: vec![false; n_mu],
        mu_headings: vec![0.0; n_mu],
        src_headings: vec![0.0; n_src],
        speed: params.speed,
        slot_period: params.slot_period,
        distance: params.distance,
        rng_seed: seed,
        stream,
        rng,
    };
    for _ in 0..n_mu {
        let p = world.uniform_point();
        world.mu_positions.push(p);
    }
    for _ in 0..n_src {
        let p = world.uniform_point();
        world.src_positions.push(p);
    }
    for _ in 0..cfg.n_bs {
        let p = world.uniform_point();
        world.bs_positions.push(p);
    }
    world
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn placement_is_seed_deterministic() {
        let cfg = NetworkConfig::fig2();
        let params = SimParams::fig2();
        let a = place_nodes(&cfg, &params, 7, 3);
        let b = place_nodes(&cfg, &params, 7, 3);
        assert_eq!(a.mu_positions, b.mu_positions);
        assert_eq!(a.src_positions, b.src_positions);
        assert_eq!(a.bs_positions, b.bs_positions);
        let c = place_nodes(&cfg, &params, 7, 4);
        assert_ne!(a.mu_positions, c.mu_positions);
    }

    #[test]
    fn positions_inside_square() {
        let cfg = NetworkConfig::fig2();
        let w = place_nodes(&cfg, &SimParams::fig2(), 1, 0);
        let inside = |p: &Point| (0.0..=w.side).contains(&p[0]) && (0.0..=w.side).contains(&p[1]);
        assert!(w
            .mu_positions
            .iter()
            .chain(&w.src_positions)
            .chain(&w.bs_positions)
            .all(inside));
        assert_eq!(w.covered_count(), 0);
    }

    #[test]
    fn empty_mu_set() {
        let cfg = NetworkConfig {
            n_mu: 0,
            ..NetworkConfig::fig2()
        };
        let w = place_nodes(&cfg, &SimParams::fig2(), 1, 0);
        assert!(w.mu_positions.is_empty() && w.covered.is_empty());
    }

    #[test]
    fn torus_distance_wraps() {
        let cfg = NetworkConfig::fig2();
        let mut w = place_nodes(&cfg, &SimParams::fig2(), 1, 0);
        assert_eq!(w.dist2([10.0, 10.0], [1990.0, 1990.0]), 800.0);
        w.distance = DistanceMetric::Bounded;
        assert_eq!(w.dist2([10.0, 10.0], [1990.0, 10.0]), 1980.0 * 1980.0);
    }

    #[test]
    fn mean_position_is_centered() {
        // Mean of 10^4 uniform coordinates: SE = L / sqrt(12 * 10^4).
        let cfg = NetworkConfig {
            n_mu: 1,
            n_src: 1,
            n_bs: 1,
            ..NetworkConfig::fig2()
        };
        let n = 10_000;
        let (mut sx, mut sy) = (0.0, 0.0);
        for i in 0..n {
            let w = place_nodes(&cfg, &SimParams::fig2(), 99, i);
            sx += w.mu_positions[0][0];
            sy += w.mu_positions[0][1];
        }
        let se = 2000.0 / (12.0 * n as f64).sqrt();
        assert!((sx / n as f64 - 1000.0).abs() < 3.0 * se);
        assert!((sy / n as f64 - 1000.0).abs() < 3.0 * se);
    }
}
