use rand::Rng;

use crate::error::{Error, Result};
use crate::world::{Heading, RobotPose, World};

/// `n` start poses whose geodesic distance to the target is within half a
/// cell of `distance_m`, cells uniform over the band, headings uniform.
pub fn sample_start_poses<R: Rng + ?Sized>(
    world: &World,
    distance_m: f64,
    n: usize,
    rng: &mut R,
) -> Result<Vec<RobotPose>> {
    let half = world.cell_size / 2.0;
    let reachable: Vec<_> = world.passable_cells().filter_map(|(c, d)| d.map(|d| (c, d))).collect();
    let band: Vec<_> =
        reachable.iter().filter(|(_, d)| *d > 0.0 && (d - distance_m).abs() <= half + 1e-9).map(|(c, _)| *c).collect();
    if band.is_empty() || distance_m.is_nan() || distance_m <= 0.0 {
        let nearest = reachable
            .iter()
            .map(|(_, d)| *d)
            .filter(|d| *d > 0.0)
            .min_by(|a, b| (a - distance_m).abs().total_cmp(&(b - distance_m).abs()))
            .unwrap_or(0.0);
        return Err(Error::EmptyBand { requested_m: distance_m, nearest_m: nearest });
    }
    Ok((0..n)
        .map(|_| {
            let cell = band[rng.random_range(0..band.len())];
            let heading = Heading::wrapping(rng.random_range(0..8));
            RobotPose { cell, heading }
        })
        .collect())
}
