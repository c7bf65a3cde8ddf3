use std::f64::consts::TAU;

use super::CircleForm;
use crate::error::{Error, Result};
use crate::trig::{angle_diff, wrap_angle, Jet};

/// Minimum `|β'(z)|` at a zero, relative to `max |β'|`.
pub const DEFAULT_MORSE_TOL: f64 = 1e-8;

const BISECT_WIDTH: f64 = 1e-13;
const DUPLICATE_GAP: f64 = 1e-11;

/// Ordered zeros `0 ≤ t_1 < … < t_k < 2π` with `β'(t_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSet {
    pub zeros: Vec<f64>,
    pub derivatives: Vec<f64>,
    /// `max |β|` over the scan grid.
    pub max_value: f64,
    /// `max |β'|` over the scan grid.
    pub max_derivative: f64,
}

impl ZeroSet {
    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }
}

pub fn find_zeros(form: &CircleForm) -> Result<ZeroSet> {
    find_zeros_with_tol(form, DEFAULT_MORSE_TOL)
}

/// Sign-change scan, bisection and a Newton polish; then Morse validation of
/// every zero and of every critical point that comes close to the axis.
pub fn find_zeros_with_tol(form: &CircleForm, morse_tol: f64) -> Result<ZeroSet> {
    let n = form.scan_resolution();
    let h = TAU / n as f64;
    let ts: Vec<f64> = (0..n).map(|j| h * j as f64).collect();
    let jets: Vec<Jet> = form.series().sample_jets(n);

    let max_value = jets.iter().fold(0.0f64, |m, j| m.max(j.value.abs()));
    let max_derivative = jets.iter().fold(0.0f64, |m, j| m.max(j.d1.abs()));
    if max_value.is_nan() || max_value == 0.0 {
        return Err(Error::ZeroForm);
    }
    let threshold = morse_tol * max_derivative;

    let value = |t: f64| form.eval(t);
    let slope = |t: f64| form.derivative(t);
    let curvature = |t: f64| form.jet(t).d2;

    let mut zeros = Vec::new();
    let mut critical = Vec::new();
    for j in 0..n {
        let (lo, hi) = (ts[j], ts[j] + h);
        let (v0, v1) = (jets[j].value, jets[(j + 1) % n].value);
        if v0 == 0.0 {
            zeros.push(lo);
        } else if v0 * v1 < 0.0 {
            zeros.push(refine_root(&value, &slope, lo, hi, v0));
        }
        let (d0, d1) = (jets[j].d1, jets[(j + 1) % n].d1);
        if d0 == 0.0 {
            critical.push(lo);
        } else if d0 * d1 < 0.0 {
            critical.push(refine_root(&slope, &curvature, lo, hi, d0));
        }
    }
    let zeros = dedupe(zeros);

    let derivatives: Vec<f64> = zeros.iter().map(|&z| form.derivative(z)).collect();
    for (&z, &d) in zeros.iter().zip(&derivatives) {
        if d.abs() < threshold {
            return Err(Error::MorseViolation {
                location: z,
                derivative: d.abs(),
                threshold,
            });
        }
    }

    // A critical point with β ≈ 0 is a (near-)degenerate zero even when the
    // scan saw no sign change there.
    for &c in &critical {
        let jet = form.jet(c);
        let implied = (2.0 * jet.value.abs() * jet.d2.abs()).sqrt();
        if implied < threshold {
            return Err(Error::MorseViolation {
                location: c,
                derivative: implied,
                threshold,
            });
        }
        if jet.value * jet.d2 < 0.0 {
            let half_gap = (-2.0 * jet.value / jet.d2).sqrt();
            if half_gap < h {
                let nearby = zeros
                    .iter()
                    .filter(|&&z| angle_diff(z, c).abs() <= half_gap + h)
                    .count();
                if nearby < 2 {
                    return Err(Error::MorseViolation {
                        location: c,
                        derivative: implied,
                        threshold,
                    });
                }
            }
        }
    }

    let k = zeros.len();
    if k == 0 {
        return Err(Error::NoZeros);
    }
    if k % 2 == 1 {
        return Err(Error::OddZeroCount { count: k });
    }
    for i in 0..k {
        if derivatives[i].signum() == derivatives[(i + 1) % k].signum() {
            return Err(Error::AlternationViolation {
                index: i,
                value: derivatives[i],
            });
        }
    }

    Ok(ZeroSet {
        zeros,
        derivatives,
        max_value,
        max_derivative,
    })
}

fn refine_root<F, D>(f: &F, df: &D, mut lo: f64, mut hi: f64, f_lo: f64) -> f64
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let positive_lo = f_lo > 0.0;
    while hi - lo > BISECT_WIDTH {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return wrap_angle(mid);
        }
        if (fm > 0.0) == positive_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    let ft = f(t);
    let d = df(t);
    let polished = t - ft / d;
    let best = if polished.is_finite()
        && polished >= lo - BISECT_WIDTH
        && polished <= hi + BISECT_WIDTH
        && f(polished).abs() <= ft.abs()
    {
        polished
    } else {
        t
    };
    wrap_angle(best)
}

fn dedupe(mut zeros: Vec<f64>) -> Vec<f64> {
    zeros.sort_by(|a, b| a.total_cmp(b));
    let mut out: Vec<f64> = Vec::with_capacity(zeros.len());
    for z in zeros {
        if out.last().is_none_or(|&p| z - p > DUPLICATE_GAP) {
            out.push(z);
        }
    }
    if out.len() > 1 && out[0] + TAU - out[out.len() - 1] <= DUPLICATE_GAP {
        out.pop();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sin2t_zeros() {
        let b = CircleForm::trig(0.0, vec![], vec![0.0, 1.0]).unwrap();
        let z = find_zeros(&b).unwrap();
        let want = [0.0, PI / 2.0, PI, 3.0 * PI / 2.0];
        assert_eq!(z.len(), 4);
        for (got, want) in z.zeros.iter().zip(want) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        assert!(z.derivatives[0] > 0.0 && z.derivatives[1] < 0.0);
    }

    #[test]
    fn sin3t_zeros() {
        let b = CircleForm::trig(0.0, vec![], vec![0.0, 0.0, 1.0]).unwrap();
        let z = find_zeros(&b).unwrap();
        assert_eq!(z.len(), 6);
        for (i, got) in z.zeros.iter().enumerate() {
            assert!((got - i as f64 * PI / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn refined_values_are_tiny() {
        let b = CircleForm::trig(0.0, vec![0.3], vec![0.0, 1.0]).unwrap();
        let z = find_zeros(&b).unwrap();
        assert_eq!(z.len(), 4);
        for &t in &z.zeros {
            assert!(b.eval(t).abs() < 1e-12 * z.max_value);
        }
    }

    #[test]
    fn double_zero_is_a_morse_violation() {
        // 1 + cos t touches zero at π
        let b = CircleForm::trig(1.0, vec![1.0], vec![]).unwrap();
        match find_zeros(&b) {
            Err(Error::MorseViolation { location, .. }) => assert!((location - PI).abs() < 1e-6),
            other => panic!("expected MorseViolation, got {other:?}"),
        }
    }

    #[test]
    fn unresolved_cluster_is_rejected() {
        // cos(t - c0) - cos(1e-4): two zeros 2e-4 apart inside the first scan cell
        let c0 = 0.5 * TAU / 1024.0;
        let b = CircleForm::trig(-(1e-4f64).cos(), vec![c0.cos()], vec![c0.sin()]).unwrap();
        assert!(matches!(find_zeros(&b), Err(Error::MorseViolation { .. })));
    }

    #[test]
    fn volume_form_has_no_zeros() {
        assert_eq!(find_zeros(&CircleForm::volume()), Err(Error::NoZeros));
        let zero = CircleForm::trig(0.0, vec![0.0], vec![]).unwrap();
        assert_eq!(find_zeros(&zero), Err(Error::ZeroForm));
    }

    #[test]
    fn zero_just_below_two_pi_is_kept_once() {
        let shift: f64 = 1e-9;
        // sin(2(t + shift)) has a zero at 2π - shift
        let b = CircleForm::trig(0.0, vec![0.0, (2.0 * shift).sin()], vec![0.0, (2.0 * shift).cos()]).unwrap();
        let z = find_zeros(&b).unwrap();
        assert_eq!(z.len(), 4);
        assert!((z.zeros[3] - (TAU - shift)).abs() < 1e-12);
    }
}
