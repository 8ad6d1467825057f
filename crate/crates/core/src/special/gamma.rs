//! Lanczos approximation (g = 7, 9 terms).

use std::f64::consts::PI;

use num_complex::Complex64;

const G: f64 = 7.0;
const P: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

pub fn gamma_complex(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let s = (z * PI).sin();
        return Complex64::from(PI) / (s * gamma_complex(1.0 - z));
    }
    let z = z - 1.0;
    let mut x = Complex64::from(P[0]);
    for (i, &p) in P.iter().enumerate().skip(1) {
        x += p / (z + i as f64);
    }
    let t = z + G + 0.5;
    (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * x
}

/// `1/Γ(z)`, exactly zero at the poles.
pub fn recip_gamma_complex(z: Complex64) -> Complex64 {
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Complex64::from(0.0);
    }
    1.0 / gamma_complex(z)
}

pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let z = x - 1.0;
    let mut s = P[0];
    for (i, &p) in P.iter().enumerate().skip(1) {
        s += p / (z + i as f64);
    }
    let t = z + G + 0.5;
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * s
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn known_values() {
        assert_relative_eq!(gamma(5.0), 24.0, max_relative = 1e-14);
        assert_relative_eq!(gamma(0.5), PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(gamma(-0.5), -2.0 * PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(gamma(0.75), 1.225_416_702_465_177_6, max_relative = 1e-14);
    }

    #[test]
    fn complex_matches_real_and_recurrence() {
        let g = gamma_complex(Complex64::new(3.3, 0.0));
        assert_relative_eq!(g.re, gamma(3.3), max_relative = 1e-14);
        let z = Complex64::new(0.3, -1.7);
        let lhs = gamma_complex(z + 1.0);
        let rhs = z * gamma_complex(z);
        assert!((lhs - rhs).norm() < 1e-13 * lhs.norm());
        // |Γ(i y)|² = π / (y sinh(π y))
        let y = 1.3;
        let m = gamma_complex(Complex64::new(0.0, y)).norm_sqr();
        assert_relative_eq!(m, PI / (y * (PI * y).sinh()), max_relative = 1e-13);
    }
}
