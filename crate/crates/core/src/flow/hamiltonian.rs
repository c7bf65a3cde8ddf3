use crate::error::{Error, Result};
use crate::loops::Point;

/// Bump radius (in units of σ) where the cutoff starts.
pub const CUTOFF_START: f64 = 5.0;
/// Bump radius (in units of σ) beyond which the bump vanishes.
pub const CUTOFF_END: f64 = 6.0;

/// `A·exp(-r²/2σ²)·(1 - S(r/σ - 5))` with `S` a C^∞ step from 0 to 1 on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub center: Point,
    pub sigma: f64,
    pub amplitude: f64,
}

fn flat(x: f64) -> (f64, f64) {
    if x <= 0.0 {
        (0.0, 0.0)
    } else {
        let e = (-1.0 / x).exp();
        (e, e / (x * x))
    }
}

// C^∞ step: 0 on (-∞, 0], 1 on [1, ∞); returns value and derivative.
fn smoothstep(x: f64) -> (f64, f64) {
    let (a, da) = flat(x);
    let (b, db) = flat(1.0 - x);
    let sum = a + b;
    (a / sum, (da * b + a * db) / (sum * sum))
}

impl Bump {
    pub fn new(center: Point, sigma: f64, amplitude: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) || !amplitude.is_finite() || !center.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "bump needs finite center and amplitude and sigma > 0 (sigma = {sigma})"
            )));
        }
        Ok(Bump { center, sigma, amplitude })
    }

    pub fn support_radius(&self) -> f64 {
        CUTOFF_END * self.sigma
    }

    pub fn value(&self, p: Point) -> f64 {
        self.value_and_gradient(p).0
    }

    /// `(h(p), ∇h(p))`.
    pub fn value_and_gradient(&self, p: Point) -> (f64, Point) {
        let dx = p[0] - self.center[0];
        let dy = p[1] - self.center[1];
        let r2 = dx * dx + dy * dy;
        let s = self.sigma;
        let rmax = CUTOFF_END * s;
        if r2 >= rmax * rmax {
            return (0.0, [0.0, 0.0]);
        }
        let g = self.amplitude * (-0.5 * r2 / (s * s)).exp();
        // radial derivative divided by r, finite at the centre
        let mut dg_over_r = -g / (s * s);
        let mut value = g;
        if r2 > (CUTOFF_START * s).powi(2) {
            let r = r2.sqrt();
            let (w, dw) = smoothstep((r - CUTOFF_START * s) / s);
            value = g * (1.0 - w);
            dg_over_r = dg_over_r * (1.0 - w) - g * dw / (s * r);
        }
        (value, [dg_over_r * dx, dg_over_r * dy])
    }
}

/// A finite sum of compactly supported bumps.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PlanarHamiltonian {
    pub bumps: Vec<Bump>,
}

impl PlanarHamiltonian {
    pub fn new(bumps: Vec<Bump>) -> Self {
        PlanarHamiltonian { bumps }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.bumps.iter().all(|b| b.amplitude == 0.0)
    }

    pub fn value(&self, p: Point) -> f64 {
        self.bumps.iter().map(|b| b.value(p)).sum()
    }

    pub fn gradient(&self, p: Point) -> Point {
        self.value_and_gradient(p).1
    }

    pub fn value_and_gradient(&self, p: Point) -> (f64, Point) {
        self.bumps.iter().fold((0.0, [0.0, 0.0]), |(v, g), b| {
            let (bv, bg) = b.value_and_gradient(p);
            (v + bv, [g[0] + bg[0], g[1] + bg[1]])
        })
    }

    /// `X_h = (∂h/∂y, −∂h/∂x)`, i.e. `i_{X_h}(dx∧dy) = dh`.
    pub fn vector_field(&self, p: Point) -> Point {
        let g = self.gradient(p);
        [g[1], -g[0]]
    }

    /// True when `p` lies outside every bump's support.
    pub fn outside_support(&self, p: Point) -> bool {
        self.bumps.iter().all(|b| {
            let (dx, dy) = (p[0] - b.center[0], p[1] - b.center[1]);
            dx * dx + dy * dy >= b.support_radius().powi(2)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn bump() -> Bump {
        Bump::new([0.2, -0.1], 0.3, 1.7).unwrap()
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let b = bump();
        let h = 1e-6;
        for &p in &[[0.2, -0.1], [0.5, 0.3], [0.2 + 1.6, -0.1 + 0.2], [1.9, -0.4]] {
            let (_, g) = b.value_and_gradient(p);
            let fx = (b.value([p[0] + h, p[1]]) - b.value([p[0] - h, p[1]])) / (2.0 * h);
            let fy = (b.value([p[0], p[1] + h]) - b.value([p[0], p[1] - h])) / (2.0 * h);
            assert_abs_diff_eq!(g[0], fx, epsilon = 1e-8);
            assert_abs_diff_eq!(g[1], fy, epsilon = 1e-8);
        }
    }

    #[test]
    fn vanishes_outside_support() {
        let h = PlanarHamiltonian::new(vec![bump()]);
        let p = [0.2 + 1.81, -0.1];
        assert!(h.outside_support(p));
        assert_eq!(h.value(p), 0.0);
        assert_eq!(h.vector_field(p), [0.0, 0.0]);
        // continuity across the cutoff
        let inside = [0.2 + 1.8 - 1e-9, -0.1];
        assert!(h.value(inside).abs() < 1e-12);
    }

    #[test]
    fn wide_well_rotates_clockwise() {
        // -A·exp(-r²/2σ²) ≈ -A + A r²/2σ² near the origin
        let sigma = 100.0;
        let h = PlanarHamiltonian::new(vec![Bump::new([0.0, 0.0], sigma, -sigma * sigma).unwrap()]);
        let x = h.vector_field([0.3, 0.4]);
        assert_abs_diff_eq!(x[0], 0.4, epsilon = 1e-4);
        assert_abs_diff_eq!(x[1], -0.3, epsilon = 1e-4);
    }

    #[test]
    fn vector_field_is_divergence_free() {
        let h = PlanarHamiltonian::new(vec![bump(), Bump::new([-0.4, 0.5], 0.5, -0.8).unwrap()]);
        let e = 1e-5;
        for &p in &[[0.0, 0.0], [0.3, 0.7], [1.5, -0.2]] {
            let div = (h.vector_field([p[0] + e, p[1]])[0] - h.vector_field([p[0] - e, p[1]])[0]
                + h.vector_field([p[0], p[1] + e])[1]
                - h.vector_field([p[0], p[1] - e])[1])
                / (2.0 * e);
            assert!(div.abs() < 1e-7, "{div}");
        }
    }
}
