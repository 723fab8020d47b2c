//! Gamma values at half-integers and unit-ball volumes.

use std::f64::consts::PI;

/// `Γ(k/2)` for a positive integer `k`.
pub fn gamma_half(k: usize) -> f64 {
    assert!(k > 0, "gamma_half(0) is a pole");
    let mut g = if k.is_multiple_of(2) { 1.0 } else { PI.sqrt() };
    let mut x = if k.is_multiple_of(2) { 1.0 } else { 0.5 };
    let target = k as f64 / 2.0;
    while x < target - 0.25 {
        g *= x;
        x += 1.0;
    }
    g
}

/// Volume `v_n` of the Euclidean unit ball in `R^n`; `v_0 = 1`.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / n as f64 * unit_ball_volume(n - 2),
    }
}

/// Surface measure of `S^{n-1}`, equal to `n v_n`.
pub fn sphere_area(n: usize) -> f64 {
    n as f64 * unit_ball_volume(n)
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `∫_0^φ sin^n θ dθ` by the reduction formula.
pub fn sin_power_integral(n: usize, phi: f64) -> f64 {
    match n {
        0 => phi,
        1 => 1.0 - phi.cos(),
        _ => {
            let k = n as f64;
            -phi.sin().powi(n as i32 - 1) * phi.cos() / k
                + (k - 1.0) / k * sin_power_integral(n - 2, phi)
        }
    }
}

/// Volume of the cap `{x ∈ B(0,1) : x_1 ≥ s}` of the unit ball in `R^n`.
pub fn unit_ball_cap_volume(n: usize, s: f64) -> f64 {
    if s >= 1.0 {
        return 0.0;
    }
    if s <= -1.0 {
        return unit_ball_volume(n);
    }
    unit_ball_volume(n - 1) * sin_power_integral(n, s.acos())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_half_values() {
        assert!((gamma_half(1) - PI.sqrt()).abs() < 1e-15);
        assert!((gamma_half(2) - 1.0).abs() < 1e-15);
        assert!((gamma_half(3) - PI.sqrt() / 2.0).abs() < 1e-15);
        assert!((gamma_half(8) - 6.0).abs() < 1e-13);
        assert!((gamma_half(7) - 15.0 / 8.0 * PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn ball_volumes() {
        assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((unit_ball_volume(4) - PI * PI / 2.0).abs() < 1e-14);
        for n in 1..8 {
            let direct = PI.powf(n as f64 / 2.0) / gamma_half(n + 2);
            assert!((unit_ball_volume(n) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn caps_of_the_disk() {
        assert!((unit_ball_cap_volume(2, 0.0) - PI / 2.0).abs() < 1e-14);
        // circular segment: acos(s) - s sqrt(1-s^2)
        let s: f64 = 0.3;
        let seg = s.acos() - s * (1.0 - s * s).sqrt();
        assert!((unit_ball_cap_volume(2, s) - seg).abs() < 1e-14);
        // 3-ball cap of height h: pi h^2 (3 - h)/3
        let h = 0.4;
        let cap = PI * h * h * (3.0 - h) / 3.0;
        assert!((unit_ball_cap_volume(3, 1.0 - h) - cap).abs() < 1e-14);
    }
}
