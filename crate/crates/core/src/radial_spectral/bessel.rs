//! Bessel functions of the first kind and their positive zeros.

use std::f64::consts::PI;

/// `J_ν(x)` for integer order.
pub fn bessel_j(nu: u32, x: f64) -> f64 {
    match nu {
        0 => libm::j0(x),
        1 => libm::j1(x),
        n => libm::jn(n as i32, x),
    }
}

fn bessel_j_prime(nu: u32, x: f64) -> f64 {
    if nu == 0 {
        -libm::j1(x)
    } else {
        bessel_j(nu - 1, x) - nu as f64 / x * bessel_j(nu, x)
    }
}

/// The first `count` positive zeros of `J_ν`, ascending.
pub fn bessel_zeros(nu: u32, count: usize) -> Vec<f64> {
    let mu = 4.0 * (nu as f64).powi(2);
    (1..=count)
        .map(|k| {
            // McMahon's expansion as the starting guess, then Newton.
            let beta = (k as f64 + nu as f64 / 2.0 - 0.25) * PI;
            let e = 8.0 * beta;
            let mut x = beta - (mu - 1.0) / e - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * e.powi(3));
            for _ in 0..50 {
                let dx = bessel_j(nu, x) / bessel_j_prime(nu, x);
                x -= dx;
                if dx.abs() <= 4.0 * f64::EPSILON * x {
                    break;
                }
            }
            x
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_zeros() {
        let z0 = bessel_zeros(0, 3);
        assert!((z0[0] - 2.404_825_557_695_773).abs() < 1e-13);
        assert!((z0[1] - 5.520_078_110_286_311).abs() < 1e-13);
        assert!((z0[2] - 8.653_727_912_911_013).abs() < 1e-13);
        let z1 = bessel_zeros(1, 2);
        assert!((z1[0] - 3.831_705_970_207_512).abs() < 1e-13);
        assert!((z1[1] - 7.015_586_669_815_619).abs() < 1e-13);
    }

    #[test]
    fn zeros_are_roots_and_spaced_by_pi() {
        for nu in [0, 1] {
            let z = bessel_zeros(nu, 3000);
            for w in z.windows(2) {
                assert!((w[1] - w[0] - PI).abs() < 0.1);
            }
            for &x in z.iter().step_by(97) {
                assert!(bessel_j(nu, x).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn known_values() {
        assert!((bessel_j(0, 1.0) - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((bessel_j(1, 1.0) - 0.440_050_585_744_933_5).abs() < 1e-15);
        assert!((bessel_j(2, 1.0) - 0.114_903_484_931_900_5).abs() < 1e-15);
        // large-argument branch
        assert!((bessel_j(0, 100.0) - 0.019_985_850_304_223_12).abs() < 1e-15);
    }
}
