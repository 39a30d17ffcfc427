//! Real roots of low-degree polynomials by the closed-form discriminant
//! path, with a short Newton polish to pull each root back to full
//! precision after the trigonometric/Cardano evaluation.

/// Real roots of a3 x^3 + a2 x^2 + a1 x + a0, unsorted, duplicates kept.
///
/// Degenerate leading coefficients degrade the degree instead of poisoning
/// the normalization: a3 = 0 falls through to the quadratic, a2 = 0 to the
/// linear case.
pub fn real_roots(a3: f64, a2: f64, a1: f64, a0: f64) -> Vec<f64> {
    if a3 == 0.0 {
        return real_roots_quadratic(a2, a1, a0);
    }
    let p = a2 / a3;
    let q = a1 / a3;
    let r = a0 / a3;

    // x^3 + p x^2 + q x + r, Vieta-style reduction
    let qq = (p * p - 3.0 * q) / 9.0;
    let rr = (2.0 * p * p * p - 9.0 * p * q + 27.0 * r) / 54.0;
    let mut roots = if rr * rr < qq * qq * qq {
        // three real roots
        let theta = (rr / (qq * qq * qq).sqrt()).acos();
        let m = -2.0 * qq.sqrt();
        vec![
            m * (theta / 3.0).cos() - p / 3.0,
            m * ((theta + 2.0 * std::f64::consts::PI) / 3.0).cos() - p / 3.0,
            m * ((theta - 2.0 * std::f64::consts::PI) / 3.0).cos() - p / 3.0,
        ]
    } else {
        let a = -rr.signum() * (rr.abs() + (rr * rr - qq * qq * qq).sqrt()).cbrt();
        let b = if a != 0.0 { qq / a } else { 0.0 };
        let mut v = vec![a + b - p / 3.0];
        // rr^2 == qq^3 exactly: the conjugate pair collapses onto the real axis
        if rr * rr == qq * qq * qq && a != 0.0 {
            v.push(-(a + b) / 2.0 - p / 3.0);
        }
        v
    };
    for x in &mut roots {
        *x = polish(a3, a2, a1, a0, *x);
    }
    roots.retain(|x| x.is_finite());
    roots
}

fn real_roots_quadratic(a2: f64, a1: f64, a0: f64) -> Vec<f64> {
    if a2 == 0.0 {
        if a1 == 0.0 {
            return vec![]; // constant: either no root or everything, report none
        }
        return vec![-a0 / a1];
    }
    let disc = a1 * a1 - 4.0 * a2 * a0;
    if disc < 0.0 {
        return vec![];
    }
    // same-sign form avoids the cancellation in (-b + sqrt(disc)) / 2a
    let s = -(a1 + a1.signum() * disc.sqrt()) / 2.0;
    if s == 0.0 {
        return vec![0.0, -a1 / a2];
    }
    vec![s / a2, a0 / s]
}

/// A few Newton steps on the original (unnormalized) coefficients.
fn polish(a3: f64, a2: f64, a1: f64, a0: f64, mut x: f64) -> f64 {
    for _ in 0..4 {
        let f = ((a3 * x + a2) * x + a1) * x + a0;
        let df = (3.0 * a3 * x + 2.0 * a2) * x + a1;
        if df == 0.0 || !f.is_finite() {
            break;
        }
        let step = f / df;
        x -= step;
        if step.abs() <= 1e-16 * x.abs().max(1.0) {
            break;
        }
    }
    x
}
