use std::f64::consts::TAU;

use super::{segment, CircleDiffeo, CircleForm, MorseForm};
use crate::error::{Error, Result};
use crate::trig::wrap_angle;

// Below this distance from a zero the slope ratio β_s/β_t is replaced by its limit.
const NEAR_ZERO: f64 = 1e-7;

/// `∫_{t_start}^{t} β` along the positive orientation.
pub fn cumulative(form: &CircleForm, t_start: f64, t: f64) -> f64 {
    form.integral(t_start, t)
}

/// The unique `t ∈ [a, b]` with `∫_a^t β = s`.
pub fn invert_cumulative(form: &CircleForm, seg: (f64, f64), s: f64) -> Result<f64> {
    let (a, b) = seg;
    let omega = form.integral(a, b);
    let tol = 1e-12 * omega.abs();
    let (lo, hi) = if omega >= 0.0 { (0.0, omega) } else { (omega, 0.0) };
    if !(s >= lo - tol && s <= hi + tol) {
        return Err(Error::OutOfRange { value: s, lo, hi });
    }
    let s = s.clamp(lo, hi);
    Ok(if s.abs() <= 0.5 * omega.abs() {
        solve_segment(form, a, b, omega, true, s, None)
    } else {
        solve_segment(form, a, b, omega, false, omega - s, None)
    })
}

/// Finds `t ∈ [a, b]` with `∫_a^t β = c` (`from_start`) or `∫_t^b β = c`,
/// starting Newton from `guess` when it lies inside the segment.
fn solve_segment(
    form: &CircleForm,
    a: f64,
    b: f64,
    omega: f64,
    from_start: bool,
    c: f64,
    guess: Option<f64>,
) -> f64 {
    if c == 0.0 {
        return if from_start { a } else { b };
    }
    let increasing = omega > 0.0;
    // residual is monotone in t with derivative β(t) in both formulations
    let residual = |t: f64| {
        if from_start {
            form.integral(a, t) - c
        } else {
            c - form.integral(t, b)
        }
    };
    let (mut lo, mut hi) = (a, b);
    let frac = (c / omega).clamp(0.0, 1.0);
    let mut x = match guess {
        Some(g) if g > a && g < b => g,
        _ if from_start => a + frac * (b - a),
        _ => b - frac * (b - a),
    };
    let mut polishing = false;
    for _ in 0..200 {
        let r = residual(x);
        if r == 0.0 {
            return x;
        }
        if (r < 0.0) == increasing {
            lo = x;
        } else {
            hi = x;
        }
        let d = form.eval(x);
        let mut next = x - r / d;
        let inside = next.is_finite() && next >= lo && next <= hi;
        if polishing {
            if inside {
                x = next;
            }
            break;
        }
        if !inside {
            next = 0.5 * (lo + hi);
        }
        let step = (next - x).abs();
        x = next;
        if step <= 1e-15 * (1.0 + x.abs()) || hi - lo <= 1e-15 * (1.0 + x.abs()) {
            break;
        }
        // the Newton error after a step δ is about δ²/dist, dist being the distance to a zero
        let dist = (x - a).min(b - x);
        polishing = step <= 1e-9 && step * step <= 1e-17 * dist;
    }
    x
}

/// The circle map sending segment `i` of `source` to segment `i + shift` of
/// `target`, matching cumulative vorticity scaled by `ω'_{i+shift}/ω_i`.
/// Values and slopes are sampled on `m` uniform points.
pub fn transport_map(
    source: &MorseForm,
    target: &MorseForm,
    shift: usize,
    m: usize,
) -> Result<CircleDiffeo> {
    let k = source.k();
    if k != target.k() || k == 0 {
        return Err(Error::ProfileMismatch {
            shift,
            model: source.profile.omegas.clone(),
            target: target.profile.omegas.clone(),
        });
    }
    let zs = &source.zeros.zeros;
    let first = zs[0];
    let h = TAU / m as f64;
    let mut values = Vec::with_capacity(m);
    let mut slopes = Vec::with_capacity(m);
    let mut previous: Option<(usize, f64, f64)> = None;
    for j in 0..m {
        let s = h * j as f64;
        let lifted = if s < first { s + TAU } else { s };
        let i = zs.partition_point(|&z| z <= lifted) - 1;
        let (a, b) = segment(&source.zeros, i);
        let (ta, tb) = segment(&target.zeros, i + shift);
        let w_s = source.profile.omegas[i];
        let w_t = target.profile.omegas[(i + shift) % k];
        let scale = w_t / w_s;

        let guess = previous.and_then(|(pi, pu, ps)| (pi == i).then_some(pu + ps * h));
        let from_a = source.form.integral(a, lifted);
        let u = if from_a.abs() <= 0.5 * w_s.abs() {
            solve_segment(&target.form, ta, tb, w_t, true, scale * from_a, guess)
        } else {
            let from_b = source.form.integral(lifted, b);
            solve_segment(&target.form, ta, tb, w_t, false, scale * from_b, guess)
        };

        let slope = if (lifted - a).min(u - ta) < NEAR_ZERO {
            limit_slope(scale, source.form.derivative(a), target.form.derivative(ta))
        } else if (b - lifted).min(tb - u) < NEAR_ZERO {
            limit_slope(scale, source.form.derivative(b), target.form.derivative(tb))
        } else {
            scale * source.form.eval(lifted) / target.form.eval(u)
        };
        previous = Some((i, u, slope));
        values.push(wrap_angle(u));
        slopes.push(slope);
    }
    unwrap_monotone(&mut values);
    CircleDiffeo::new(values, slopes)
}

// Near a pair of matched simple zeros both cumulative integrals are quadratic,
// so the map's slope tends to sqrt(scale·β_s'/β_t').
fn limit_slope(scale: f64, ds: f64, dt: f64) -> f64 {
    (scale * ds / dt).abs().sqrt()
}

fn unwrap_monotone(values: &mut [f64]) {
    for j in 1..values.len() {
        let prev = values[j - 1];
        values[j] = prev + (values[j] - prev).rem_euclid(TAU);
    }
}

/// The β-preserving circle map with `γ(t_i) = t_{i+ℓ}`, generating the
/// stabilizer of the form.
pub fn stabilizer_generator(form: &MorseForm, ell: usize) -> Result<CircleDiffeo> {
    let k = form.k();
    if ell == 0 || ell >= k || !k.is_multiple_of(ell) {
        return Err(Error::NoSymmetry);
    }
    let scale = form.profile.max_abs();
    let matches = (0..k).all(|i| {
        (form.profile.omegas[i] - form.profile.omegas[(i + ell) % k]).abs() <= 1e-6 * scale
    });
    if !matches {
        return Err(Error::NoSymmetry);
    }
    transport_map(form, form, ell, 4 * form.form.resolution().max(256))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trig::angle_diff;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn sin2() -> CircleForm {
        CircleForm::trig(0.0, vec![], vec![0.0, 1.0]).unwrap()
    }

    #[test]
    fn cumulative_examples() {
        assert_abs_diff_eq!(cumulative(&sin2(), 0.0, PI / 4.0), 0.5, epsilon = 1e-15);
        assert_eq!(cumulative(&sin2(), 1.0, 1.0), 0.0);
    }

    #[test]
    fn inversion_examples() {
        let b = sin2();
        let seg = (0.0, PI / 2.0);
        assert_abs_diff_eq!(invert_cumulative(&b, seg, 1.0).unwrap(), PI / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(invert_cumulative(&b, seg, 0.5).unwrap(), PI / 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(invert_cumulative(&b, seg, 0.0).unwrap(), 0.0, epsilon = 1e-12);
        assert!(matches!(
            invert_cumulative(&b, seg, 1.1),
            Err(Error::OutOfRange { .. })
        ));
        let neg = (PI / 2.0, PI);
        assert_abs_diff_eq!(invert_cumulative(&b, neg, -0.5).unwrap(), 3.0 * PI / 4.0, epsilon = 1e-12);
        assert!(invert_cumulative(&b, neg, 0.5).is_err());
    }

    #[test]
    fn inversion_round_trip_near_zeros() {
        let b = CircleForm::trig(0.0, vec![0.3], vec![0.0, 1.0]).unwrap();
        let mf = MorseForm::new(b.clone()).unwrap();
        for i in 0..mf.k() {
            let (a, c) = mf.segment(i);
            for frac in [1e-9, 1e-4, 0.3, 0.5, 0.9, 1.0 - 1e-3] {
                let t = a + frac * (c - a);
                let s = cumulative(&b, a, t);
                let back = invert_cumulative(&b, (a, c), s).unwrap();
                assert!((back - t).abs() < 1e-10, "segment {i} frac {frac}: {back} vs {t}");
            }
        }
    }

    #[test]
    fn stabilizer_of_sin2t_is_half_turn() {
        let mf = MorseForm::new(sin2()).unwrap();
        let g = stabilizer_generator(&mf, 2).unwrap();
        assert!(g.sup_distance(|t| t + PI, 2000) < 1e-9);
        assert_eq!(stabilizer_generator(&mf, 4), Err(Error::NoSymmetry));
    }

    #[test]
    fn stabilizer_of_sin3t_has_order_three() {
        let b = CircleForm::trig(0.0, vec![], vec![0.0, 0.0, 1.0]).unwrap();
        let mf = MorseForm::new(b).unwrap();
        let g = stabilizer_generator(&mf, 2).unwrap();
        for j in 0..500 {
            let t = TAU * j as f64 / 500.0;
            assert!(angle_diff(g.iterate(t, 3), t).abs() < 1e-9);
        }
    }

    #[test]
    fn transport_recovers_pushforward_map() {
        let b = CircleForm::trig(0.0, vec![0.3], vec![0.0, 1.0]).unwrap();
        let gamma = CircleDiffeo::from_fn(
            |t| t + 0.2 + 0.25 * (t - 0.4).sin(),
            |t| 1.0 + 0.25 * (t - 0.4).cos(),
            1024,
        )
        .unwrap();
        let pushed = gamma.pushforward(&b, 512).unwrap();
        let (src, tgt) = (MorseForm::new(b).unwrap(), MorseForm::new(pushed).unwrap());
        let g = transport_map(&src, &tgt, 0, 1024).unwrap();
        let shift = (0..tgt.k())
            .find(|&j| angle_diff(gamma.eval(src.zeros.zeros[0]), tgt.zeros.zeros[j]).abs() < 1e-8)
            .unwrap();
        let g = if shift == 0 { g } else { transport_map(&src, &tgt, shift, 1024).unwrap() };
        assert!(g.sup_distance(|t| gamma.eval(t), 3000) < 1e-8);
        let h = 1e-6;
        for &t in &[0.3, 1.0, 2.2, 4.0, 5.9] {
            let fd = (g.eval(t + h) - g.eval(t - h)) / (2.0 * h);
            assert!((fd - g.derivative(t)).abs() < 1e-5);
        }
    }
}
