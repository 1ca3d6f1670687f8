use std::f64::consts::TAU;

use rand::Rng;

use super::world::SimWorld;
use super::Mobility;

/// Folds a coordinate back into `[0, side]` by specular reflection.
pub fn reflect(x: f64, side: f64) -> f64 {
    let y = x.rem_euclid(2.0 * side);
    if y > side {
        2.0 * side - y
    } else {
        y
    }
}

/// Advances MUs and sources by one slot; base stations stay put.
pub fn step_mobility(world: &mut SimWorld, model: Mobility) {
    match model {
        Mobility::Iid => {
            for i in 0..world.mu_positions.len() {
                world.mu_positions[i] = world.uniform_point();
            }
            for i in 0..world.src_positions.len() {
                world.src_positions[i] = world.uniform_point();
            }
        }
        Mobility::RandomDirection => {
            let hop = world.speed * world.slot_period;
            if hop == 0.0 {
                return;
            }
            let side = world.side;
            let SimWorld {
                mu_positions,
                src_positions,
                mu_headings,
                src_headings,
                rng,
                ..
            } = world;
            for (pos, heading) in mu_positions
                .iter_mut()
                .zip(mu_headings.iter_mut())
                .chain(src_positions.iter_mut().zip(src_headings.iter_mut()))
            {
                let theta = rng.random::<f64>() * TAU;
                *heading = theta;
                pos[0] = reflect(pos[0] + hop * theta.cos(), side);
                pos[1] = reflect(pos[1] + hop * theta.sin(), side);
            }
        }
    }
}
