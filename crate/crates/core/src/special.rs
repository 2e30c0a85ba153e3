use std::f64::consts::PI;

/// `Gamma(m / 2)` for a positive integer `m`, by exact recursion from
/// `Gamma(1/2) = sqrt(pi)` and `Gamma(1) = 1`. Overflows to `inf` past
/// `m = 342`.
pub fn gamma_half_integer(m: u32) -> f64 {
    assert!(m > 0, "Gamma(0) is undefined");
    let (mut x, mut g) = if m % 2 == 0 { (1.0, 1.0) } else { (0.5, PI.sqrt()) };
    let target = m as f64 / 2.0;
    while x < target {
        g *= x;
        x += 1.0;
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_known_values() {
        assert_eq!(gamma_half_integer(2), 1.0);
        assert_eq!(gamma_half_integer(4), 1.0);
        assert_eq!(gamma_half_integer(6), 2.0);
        assert!((gamma_half_integer(3) - 0.5 * PI.sqrt()).abs() < 1e-15);
        assert!((gamma_half_integer(5) - 0.75 * PI.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn agrees_with_lanczos() {
        for m in 1..60 {
            let a = gamma_half_integer(m);
            let b = statrs::function::gamma::gamma(m as f64 / 2.0);
            assert!((a / b - 1.0).abs() < 1e-12, "m={m}");
        }
    }
}
