use inhand_geometry::Vec3;

/// Shortest and longest spatial wavelengths (meters) of the rotary ladder.
/// The band brackets the scales that matter on a tabletop: sub-pixel detail
/// near 2 cm up to the whole workspace at 4 m.
const LAMBDA_MIN: f64 = 0.02;
const LAMBDA_MAX: f64 = 4.0;

/// Rotary phase angles for a token at world position `p`.
///
/// Rotation pairs are dealt round-robin to the three world axes (pair j
/// serves axis j % 3 with frequency rank j / 3), so any pair budget works
/// even when it is not divisible by three. Within an axis the wavelengths
/// are log-spaced over [LAMBDA_MIN, LAMBDA_MAX]. Angles are accumulated in
/// f64 and reduced into [0, 2pi) before use so that downcasting to f32
/// cannot destroy the relative-phase property.
pub fn position_theta(p: Vec3, pairs: usize) -> Vec<f64> {
    let tau = std::f64::consts::TAU;
    let coords = [p.x, p.y, p.z];
    // Pairs serving each axis: ceil-division split of the round-robin deal.
    let count = |axis: usize| (pairs + 2 - axis) / 3;
    (0..pairs)
        .map(|j| {
            let axis = j % 3;
            let rank = j / 3;
            let n = count(axis);
            let t = if n > 1 {
                rank as f64 / (n - 1) as f64
            } else {
                0.0
            };
            let lambda = LAMBDA_MIN * (LAMBDA_MAX / LAMBDA_MIN).powf(t);
            (tau / lambda * coords[axis]).rem_euclid(tau)
        })
        .collect()
}
