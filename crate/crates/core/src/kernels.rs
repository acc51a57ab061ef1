//! Low-level numerical primitives: discrete Fourier transform with
//! amplitude/phase separation, dominant singular triple extraction by power
//! iteration, and non-negativity constrained least squares.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::{Error, Result};

/// Amplitude/phase factorization of a complex spectrum.
///
/// `amplitude` is the modulus (shift-invariant part); `phase` has unit
/// modulus and carries the position information. At zero-amplitude bins the
/// phase is defined as 1 so that recombination is well defined.
#[derive(Debug, Clone)]
pub struct SpectrumSplit {
    pub amplitude: Vec<f64>,
    pub phase: Vec<Complex64>,
}

/// Dominant singular triple of a real matrix.
///
/// `left` and `right` are unit vectors with the sign convention
/// `sum(left) >= 0`; `sigma >= 0`.
#[derive(Debug, Clone)]
pub struct Rank1Triple {
    pub left: Array1<f64>,
    pub right: Array1<f64>,
    pub sigma: f64,
}

/// Unnormalized forward DFT of a real signal.
pub fn dft_forward(signal: &[f64]) -> Result<Vec<Complex64>> {
    if signal.is_empty() {
        return Err(Error::Degenerate("dft_forward on empty signal".into()));
    }
    if !signal.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("dft_forward input"));
    }
    let mut buf: Vec<Complex64> = signal.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new()
        .plan_fft_forward(buf.len())
        .process(&mut buf);
    Ok(buf)
}

/// Unnormalized inverse DFT (caller-side 1/n applied here).
fn dft_inverse(spectrum: &[Complex64]) -> Vec<Complex64> {
    let n = spectrum.len();
    let mut buf = spectrum.to_vec();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    for v in &mut buf {
        *v *= scale;
    }
    buf
}

/// Splits a spectrum into its shift-invariant amplitude and unit-modulus
/// phase.
pub fn split_spectrum(spectrum: &[Complex64]) -> SpectrumSplit {
    let mut amplitude = Vec::with_capacity(spectrum.len());
    let mut phase = Vec::with_capacity(spectrum.len());
    for z in spectrum {
        let a = z.norm();
        amplitude.push(a);
        if a == 0.0 {
            phase.push(Complex64::new(1.0, 0.0));
        } else {
            phase.push(z / a);
        }
    }
    SpectrumSplit { amplitude, phase }
}

/// Relative tolerance for the imaginary residue left after inverting an
/// amplitude/phase product that should be conjugate-symmetric.
pub const IMAG_RESIDUE_TOL: f64 = 1e-8;

/// Recombines amplitude and phase and inverts the DFT back to a real signal.
///
/// The product must be conjugate-symmetric up to numerical noise; a larger
/// imaginary residue is reported as a constraint-stage failure.
pub fn recombine_invert(sp: &SpectrumSplit) -> Result<Vec<f64>> {
    recombine_invert_with_residue(sp).map(|(v, _)| v)
}

/// Same as [`recombine_invert`] but also reports the relative imaginary
/// residue that was discarded.
pub fn recombine_invert_with_residue(sp: &SpectrumSplit) -> Result<(Vec<f64>, f64)> {
    if sp.amplitude.len() != sp.phase.len() {
        return Err(Error::DimensionMismatch {
            context: "recombine_invert",
            expected: sp.amplitude.len().to_string(),
            actual: sp.phase.len().to_string(),
        });
    }
    let spectrum: Vec<Complex64> = sp
        .amplitude
        .iter()
        .zip(&sp.phase)
        .map(|(&a, p)| p * a)
        .collect();
    let time = dft_inverse(&spectrum);
    let max_real = time.iter().map(|z| z.re.abs()).fold(0.0f64, f64::max);
    let max_imag = time.iter().map(|z| z.im.abs()).fold(0.0f64, f64::max);
    let tol = IMAG_RESIDUE_TOL * max_real.max(f64::MIN_POSITIVE);
    if max_imag > tol && max_real > 0.0 {
        return Err(Error::ConjugateSymmetry {
            residual: max_imag,
            tol,
        });
    }
    let rel = if max_real > 0.0 {
        max_imag / max_real
    } else {
        0.0
    };
    Ok((time.iter().map(|z| z.re).collect(), rel))
}

const POWER_ITER_BUDGET: usize = 10_000;
const POWER_ITER_TOL: f64 = 1e-12;

/// Dominant singular triple of `m` by alternating power iteration with a
/// deterministic all-ones start.
///
/// For entrywise non-negative input the factors are made entrywise
/// non-negative: entries in `[-1e-12, 0)` are clipped, anything below that is
/// an error (it would indicate the iteration left the Perron cone).
pub fn rank1_approx(m: ArrayView2<f64>) -> Result<Rank1Triple> {
    let (rows, cols) = m.dim();
    if !m.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("rank1_approx input"));
    }
    if m.iter().all(|&v| v == 0.0) {
        let mut left = Array1::zeros(rows);
        let mut right = Array1::zeros(cols);
        left[0] = 1.0;
        right[0] = 1.0;
        return Ok(Rank1Triple {
            left,
            right,
            sigma: 0.0,
        });
    }

    let nonneg_input = m.iter().all(|&v| v >= 0.0);
    let mut right = Array1::from_elem(cols, 1.0 / (cols as f64).sqrt());
    let mut left = Array1::zeros(rows);
    let mut sigma = 0.0f64;
    let mut converged = false;
    for _ in 0..POWER_ITER_BUDGET {
        let mv = m.dot(&right);
        let norm_mv = mv.dot(&mv).sqrt();
        if norm_mv == 0.0 {
            // right landed in the null space; restart orthogonal to it is not
            // needed for the non-negative matrices this crate feeds in, treat
            // as degenerate.
            return Err(Error::Degenerate(
                "power iteration hit the null space".into(),
            ));
        }
        left = mv / norm_mv;
        let mtu = m.t().dot(&left);
        let new_sigma = mtu.dot(&mtu).sqrt();
        if new_sigma == 0.0 {
            return Err(Error::Degenerate(
                "power iteration hit the null space".into(),
            ));
        }
        right = mtu / new_sigma;
        let rel = (new_sigma - sigma).abs() / new_sigma.max(f64::MIN_POSITIVE);
        sigma = new_sigma;
        if rel < POWER_ITER_TOL {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence(format!(
            "rank1_approx: {POWER_ITER_BUDGET} power iterations without sigma settling"
        )));
    }
    // Recompute left for the final right so the triple is consistent.
    let mv = m.dot(&right);
    let norm_mv = mv.dot(&mv).sqrt();
    if norm_mv > 0.0 {
        left = mv / norm_mv;
    }
    if left.sum() < 0.0 {
        left.mapv_inplace(|v| -v);
        right.mapv_inplace(|v| -v);
    }
    if nonneg_input {
        for v in left.iter_mut().chain(right.iter_mut()) {
            if *v < -1e-12 {
                return Err(Error::NegativeAmplitude { value: *v });
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
    }
    Ok(Rank1Triple { left, right, sigma })
}

/// Diagnostic: ratio of the second singular value to the first, estimated by
/// one deflation step. Returns 0 for (numerically) rank-1 or rank-0 input.
pub fn second_singular_ratio(m: ArrayView2<f64>, triple: &Rank1Triple) -> f64 {
    if triple.sigma == 0.0 {
        return 0.0;
    }
    let deflated = m.to_owned()
        - triple.sigma
            * &triple
                .left
                .view()
                .insert_axis(ndarray::Axis(1))
                .dot(&triple.right.view().insert_axis(ndarray::Axis(0)));
    match rank1_approx(deflated.view()) {
        Ok(t2) => t2.sigma / triple.sigma,
        Err(_) => 0.0,
    }
}

/// Outcome of a non-negative least squares solve.
#[derive(Debug, Clone)]
pub struct NnlsSolution {
    pub x: Array1<f64>,
    /// Passive (strictly positive) coordinate set at the solution; reusable
    /// as a warm start.
    pub passive: Vec<usize>,
    /// Set when a rank-deficient passive subproblem was resolved by the
    /// minimum-norm fallback.
    pub rank_deficient: bool,
}

/// Minimizes `||A x - b||^2` subject to `x >= 0`.
///
/// Active-set method (Lawson-Hanson) run on the normal equations
/// `G = A^T A`, `h = A^T b`.
pub fn nnls(a: ArrayView2<f64>, b: ArrayView1<f64>) -> Result<NnlsSolution> {
    let (m, n) = a.dim();
    if m == 0 || n == 0 || b.len() != m {
        return Err(Error::DimensionMismatch {
            context: "nnls",
            expected: format!("A m x n with m,n >= 1 and |b| = m = {m}"),
            actual: format!("A {m}x{n}, |b| = {}", b.len()),
        });
    }
    let gram = a.t().dot(&a);
    let h = a.t().dot(&b);
    nnls_gram(&gram, &h, None)
}

/// Lawson-Hanson on the normal-equations form: minimize
/// `x^T G x - 2 h^T x` over `x >= 0`, with `G = A^T A`, `h = A^T b`.
///
/// `warm_passive` seeds the passive set from a previous solve of a nearby
/// problem; infeasible warm starts fall back to the cold start.
pub fn nnls_gram(
    gram: &Array2<f64>,
    h: &Array1<f64>,
    warm_passive: Option<&[usize]>,
) -> Result<NnlsSolution> {
    let n = h.len();
    let tol = 1e-10 * h.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
    let mut x = Array1::<f64>::zeros(n);
    let mut passive: Vec<usize> = Vec::new();
    let mut rank_deficient = false;

    if let Some(warm) = warm_passive {
        let warm: Vec<usize> = warm.iter().copied().filter(|&i| i < n).collect();
        if !warm.is_empty() {
            let (z, deficient) = solve_passive(gram, h, &warm);
            if z.iter().all(|&v| v > 0.0) {
                for (&idx, &v) in warm.iter().zip(z.iter()) {
                    x[idx] = v;
                }
                passive = warm;
                rank_deficient |= deficient;
            }
        }
    }

    // Outer loop: grow the passive set while a KKT violation exists.
    // Variables that enter but make no progress (rank-deficient subsystems
    // push their target to zero) are banned until `x` changes, which
    // prevents the classic active-set cycle.
    let budget = 3 * n + 30;
    let mut banned: Vec<usize> = Vec::new();
    for _ in 0..budget {
        let grad = h - &gram.dot(&x);
        let mut best: Option<(usize, f64)> = None;
        for idx in 0..n {
            if !passive.contains(&idx) && !banned.contains(&idx) && grad[idx] > tol {
                if best.map_or(true, |(_, g)| grad[idx] > g) {
                    best = Some((idx, grad[idx]));
                }
            }
        }
        let Some((enter, _)) = best else {
            return Ok(NnlsSolution {
                x,
                passive,
                rank_deficient,
            });
        };
        passive.push(enter);
        let x_before = x.clone();

        // Inner loop: step toward the passive-set LS solution, dropping
        // variables that would go negative.
        loop {
            let (z, deficient) = solve_passive(gram, h, &passive);
            rank_deficient |= deficient;
            if z.iter().all(|&v| v > 0.0) {
                x.fill(0.0);
                for (&idx, &v) in passive.iter().zip(z.iter()) {
                    x[idx] = v;
                }
                break;
            }
            // Line search toward z along the current passive coordinates.
            let mut alpha = f64::INFINITY;
            for (&idx, &zv) in passive.iter().zip(z.iter()) {
                if zv <= 0.0 {
                    let xv = x[idx];
                    let denom = xv - zv;
                    if denom > 0.0 {
                        alpha = alpha.min(xv / denom);
                    } else {
                        alpha = 0.0;
                    }
                }
            }
            let alpha = alpha.min(1.0).max(0.0);
            for (&idx, &zv) in passive.iter().zip(z.iter()) {
                x[idx] += alpha * (zv - x[idx]);
            }
            let kept: Vec<usize> = passive
                .iter()
                .copied()
                .filter(|&idx| x[idx] > 0.0)
                .collect();
            for idx in 0..n {
                if !kept.contains(&idx) {
                    x[idx] = 0.0;
                }
            }
            if kept.len() == passive.len() {
                // No variable left the set despite a non-positive target;
                // accept the clipped point to avoid cycling.
                break;
            }
            passive = kept;
            if passive.is_empty() {
                break;
            }
        }
        if x == x_before {
            passive.retain(|&idx| idx != enter || x[idx] > 0.0);
            banned.push(enter);
        } else {
            banned.clear();
        }
    }
    Err(Error::NonConvergence(
        "nnls active-set loop exceeded its budget".into(),
    ))
}

/// Solves the passive-set normal equations `G_PP z = h_P`. Falls back to a
/// minimum-norm solution via eigendecomposition when the subsystem is
/// numerically singular; the flag reports that fallback.
fn solve_passive(gram: &Array2<f64>, h: &Array1<f64>, passive: &[usize]) -> (Vec<f64>, bool) {
    let p = passive.len();
    let mut g = Array2::<f64>::zeros((p, p));
    let mut rhs = vec![0.0; p];
    for (a, &ia) in passive.iter().enumerate() {
        rhs[a] = h[ia];
        for (b, &ib) in passive.iter().enumerate() {
            g[[a, b]] = gram[[ia, ib]];
        }
    }
    match cholesky_solve(&g, &rhs) {
        Some(z) => (z, false),
        None => (min_norm_solve(&g, &rhs), true),
    }
}

/// Cholesky solve for a small SPD system; `None` when a pivot is not
/// sufficiently positive.
fn cholesky_solve(g: &Array2<f64>, rhs: &[f64]) -> Option<Vec<f64>> {
    let n = rhs.len();
    let mut l = Array2::<f64>::zeros((n, n));
    let scale = g.diag().iter().cloned().fold(0.0f64, f64::max);
    for j in 0..n {
        let mut d = g[[j, j]];
        for k in 0..j {
            d -= l[[j, k]] * l[[j, k]];
        }
        if d <= 1e-13 * scale.max(f64::MIN_POSITIVE) {
            return None;
        }
        l[[j, j]] = d.sqrt();
        for i in j + 1..n {
            let mut s = g[[i, j]];
            for k in 0..j {
                s -= l[[i, k]] * l[[j, k]];
            }
            l[[i, j]] = s / l[[j, j]];
        }
    }
    // Forward then back substitution.
    let mut y = rhs.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] -= l[[i, k]] * y[k];
        }
        y[i] /= l[[i, i]];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            y[i] -= l[[k, i]] * y[k];
        }
        y[i] /= l[[i, i]];
    }
    Some(y)
}

/// Minimum-norm solution of a singular symmetric system through a Jacobi
/// eigendecomposition, discarding near-null eigendirections.
fn min_norm_solve(g: &Array2<f64>, rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    let (evals, evecs) = jacobi_eigh(g);
    let max_ev = evals.iter().cloned().fold(0.0f64, |a, b| a.max(b.abs()));
    let cutoff = 1e-12 * max_ev.max(f64::MIN_POSITIVE);
    let mut z = vec![0.0; n];
    for (idx, &ev) in evals.iter().enumerate() {
        if ev.abs() <= cutoff {
            continue;
        }
        let mut proj = 0.0;
        for r in 0..n {
            proj += evecs[[r, idx]] * rhs[r];
        }
        let coeff = proj / ev;
        for r in 0..n {
            z[r] += coeff * evecs[[r, idx]];
        }
    }
    z
}

/// Cyclic Jacobi eigendecomposition of a small symmetric matrix.
fn jacobi_eigh(g: &Array2<f64>) -> (Vec<f64>, Array2<f64>) {
    let n = g.nrows();
    let mut a = g.clone();
    let mut v = Array2::<f64>::eye(n);
    for _ in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[[p, q]] * a[[p, q]];
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[[p, q]].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[[q, q]] - a[[p, p]]) / (2.0 * a[[p, q]]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[[k, p]];
                    let akq = a[[k, q]];
                    a[[k, p]] = c * akp - s * akq;
                    a[[k, q]] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[[p, k]];
                    let aqk = a[[q, k]];
                    a[[p, k]] = c * apk - s * aqk;
                    a[[q, k]] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }
    (a.diag().to_vec(), v)
}

/// Row-wise NNLS update of the concentration factor: each row `r` of the
/// result solves `min ||S c_r - x_r||^2, c_r >= 0` for the corresponding
/// row `x_r` of `X`.
///
/// `warm` optionally carries per-row passive sets from the previous ALS
/// iteration and is updated in place.
pub fn cls_step_c(
    x: ArrayView2<f64>,
    s: ArrayView2<f64>,
    warm: Option<&mut Vec<Vec<usize>>>,
) -> Result<Array2<f64>> {
    row_wise_nnls(x, s, warm, "cls_step_C")
}

/// Row-wise NNLS update of the spectral factor: row `j` of the result solves
/// `min ||C s_j - x_j||^2, s_j >= 0` against column `j` of `X`.
pub fn cls_step_s(
    x: ArrayView2<f64>,
    c: ArrayView2<f64>,
    warm: Option<&mut Vec<Vec<usize>>>,
) -> Result<Array2<f64>> {
    row_wise_nnls(x.t(), c, warm, "cls_step_S")
}

fn row_wise_nnls(
    x: ArrayView2<f64>,
    basis: ArrayView2<f64>,
    warm: Option<&mut Vec<Vec<usize>>>,
    context: &'static str,
) -> Result<Array2<f64>> {
    let (rows, inner) = x.dim();
    let (b_rows, r) = basis.dim();
    if b_rows != inner {
        return Err(Error::DimensionMismatch {
            context: "cls step",
            expected: format!("basis with {inner} rows"),
            actual: format!("{b_rows} rows"),
        });
    }
    for col in 0..r {
        if basis.column(col).iter().all(|&v| v == 0.0) {
            return Err(Error::Degenerate(format!(
                "{context}: fixed factor column {col} is all zero"
            )));
        }
    }
    let gram = basis.t().dot(&basis);
    let targets = x.dot(&basis); // rows x R
    let mut out = Array2::<f64>::zeros((rows, r));
    let mut warm = warm;
    for row in 0..rows {
        let h = targets.row(row).to_owned();
        let prior = warm.as_ref().and_then(|w| w.get(row)).map(|v| v.as_slice());
        let sol = nnls_gram(&gram, &h, prior)?;
        out.row_mut(row).assign(&sol.x);
        if let Some(w) = warm.as_mut() {
            if row < w.len() {
                w[row] = sol.passive;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use rand::{Rng, SeedableRng};

    /// Naive O(n^2) DFT oracle.
    fn naive_dft(signal: &[f64]) -> Vec<Complex64> {
        let n = signal.len();
        (0..n)
            .map(|k| {
                (0..n)
                    .map(|t| {
                        let ang = -2.0 * std::f64::consts::PI * (k * t) as f64 / n as f64;
                        Complex64::new(ang.cos(), ang.sin()) * signal[t]
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn dft_constant_and_impulse() {
        let z = dft_forward(&[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(z[0].re, 4.0, epsilon = 1e-12);
        for k in 1..4 {
            assert!(z[k].norm() < 1e-12);
        }
        let z = dft_forward(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        for k in 0..4 {
            assert_abs_diff_eq!(z[k].re, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(z[k].im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn dft_matches_naive_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let x: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let fast = dft_forward(&x).unwrap();
        let slow = naive_dft(&x);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn dft_rejects_nonfinite() {
        assert!(dft_forward(&[1.0, f64::NAN]).is_err());
    }

    #[test]
    fn parseval() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let x: Vec<f64> = (0..17).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let z = dft_forward(&x).unwrap();
        let lhs: f64 = z.iter().map(|v| v.norm_sqr()).sum();
        let rhs: f64 = 17.0 * x.iter().map(|v| v * v).sum::<f64>();
        assert!((lhs - rhs).abs() < 1e-10 * rhs);
    }

    #[test]
    fn amplitude_shift_invariance() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let x: Vec<f64> = (0..16).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let base = split_spectrum(&dft_forward(&x).unwrap());
        for shift in 0..16 {
            let shifted: Vec<f64> = (0..16).map(|t| x[(t + 16 - shift) % 16]).collect();
            let sp = split_spectrum(&dft_forward(&shifted).unwrap());
            for (a, b) in base.amplitude.iter().zip(&sp.amplitude) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn split_shifted_impulse_amplitude_all_ones() {
        let sp = split_spectrum(&dft_forward(&[0.0, 0.0, 1.0, 0.0]).unwrap());
        for a in &sp.amplitude {
            assert_abs_diff_eq!(*a, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn split_zero_spectrum() {
        let sp = split_spectrum(&[Complex64::new(0.0, 0.0); 5]);
        assert!(sp.amplitude.iter().all(|&a| a == 0.0));
        assert!(sp.phase.iter().all(|p| *p == Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn split_recombine_round_trip() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let z: Vec<Complex64> = (0..9)
            .map(|_| Complex64::new(rng.gen_range(0.1..1.0), rng.gen_range(0.1..1.0)))
            .collect();
        let sp = split_spectrum(&z);
        for (orig, (a, p)) in z.iter().zip(sp.amplitude.iter().zip(&sp.phase)) {
            assert!((orig - p * *a).norm() < 1e-14);
        }
    }

    #[test]
    fn recombine_invert_round_trip() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let x: Vec<f64> = (0..12).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let sp = split_spectrum(&dft_forward(&x).unwrap());
        let back = recombine_invert(&sp).unwrap();
        for (a, b) in x.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn recombine_invert_restores_shift() {
        // Amplitude of a Gaussian with the phase of its shifted copy gives
        // the shifted Gaussian.
        let n = 32;
        let gauss: Vec<f64> = (0..n)
            .map(|t| (-((t as f64 - 10.0) / 3.0).powi(2) / 2.0).exp())
            .collect();
        let shift = 5usize;
        let shifted: Vec<f64> = (0..n).map(|t| gauss[(t + n - shift) % n]).collect();
        let amp = split_spectrum(&dft_forward(&gauss).unwrap()).amplitude;
        let phase = split_spectrum(&dft_forward(&shifted).unwrap()).phase;
        let rebuilt = recombine_invert(&SpectrumSplit {
            amplitude: amp,
            phase,
        })
        .unwrap();
        for (a, b) in rebuilt.iter().zip(&shifted) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn recombine_invert_zero_amplitude() {
        let sp = SpectrumSplit {
            amplitude: vec![0.0; 6],
            phase: vec![Complex64::new(1.0, 0.0); 6],
        };
        let out = recombine_invert(&sp).unwrap();
        assert!(out.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn recombine_invert_rejects_symmetry_breakage() {
        // A one-sided spectrum is not conjugate-symmetric.
        let mut amp = vec![0.0; 8];
        amp[1] = 1.0;
        let sp = SpectrumSplit {
            amplitude: amp,
            phase: vec![Complex64::new(1.0, 0.0); 8],
        };
        assert!(matches!(
            recombine_invert(&sp),
            Err(Error::ConjugateSymmetry { .. })
        ));
    }

    #[test]
    fn rank1_exact_rank1_input() {
        let u = array![1.0, 2.0, 2.0];
        let v = array![3.0, 4.0];
        let m = u
            .view()
            .insert_axis(ndarray::Axis(1))
            .dot(&v.view().insert_axis(ndarray::Axis(0)));
        let t = rank1_approx(m.view()).unwrap();
        let nu = (u.dot(&u)).sqrt();
        let nv = (v.dot(&v)).sqrt();
        assert_abs_diff_eq!(t.sigma, nu * nv, epsilon = 1e-10);
        for (a, b) in t.left.iter().zip(u.iter()) {
            assert_abs_diff_eq!(*a, b / nu, epsilon = 1e-10);
        }
        for (a, b) in t.right.iter().zip(v.iter()) {
            assert_abs_diff_eq!(*a, b / nv, epsilon = 1e-10);
        }
    }

    #[test]
    fn rank1_diagonal() {
        let m = array![[2.0, 0.0], [0.0, 1.0]];
        let t = rank1_approx(m.view()).unwrap();
        assert_abs_diff_eq!(t.sigma, 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(t.left[0], 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(t.right[0], 1.0, epsilon = 1e-8);
    }

    #[test]
    fn rank1_all_zero() {
        let m = Array2::<f64>::zeros((3, 2));
        let t = rank1_approx(m.view()).unwrap();
        assert_eq!(t.sigma, 0.0);
        assert_eq!(t.left[0], 1.0);
        assert_eq!(t.right[0], 1.0);
    }

    /// Dense eigen oracle: largest singular value via Jacobi on M^T M.
    fn sigma_max_oracle(m: &Array2<f64>) -> f64 {
        let mtm = m.t().dot(m);
        let (evals, _) = jacobi_eigh(&mtm);
        evals.iter().cloned().fold(0.0f64, f64::max).sqrt()
    }

    #[test]
    fn rank1_matches_eigen_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let m = Array2::from_shape_fn((5, 4), |_| rng.gen_range(0.0..1.0));
            let t = rank1_approx(m.view()).unwrap();
            let oracle = sigma_max_oracle(&m);
            assert!((t.sigma - oracle).abs() < 1e-10 * oracle.max(1.0));
        }
    }

    #[test]
    fn rank1_property_up_to_8x8() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(33);
        for _ in 0..40 {
            let rows = rng.gen_range(1..=8);
            let cols = rng.gen_range(1..=8);
            let m = Array2::from_shape_fn((rows, cols), |_| rng.gen_range(-1.0..1.0));
            let t = rank1_approx(m.view()).unwrap();
            let oracle = sigma_max_oracle(&m);
            assert!(
                (t.sigma - oracle).abs() < 1e-9 * oracle.max(1.0),
                "sigma {} vs oracle {}",
                t.sigma,
                oracle
            );
        }
    }

    #[test]
    fn second_singular_ratio_rank1_is_zero() {
        let u = array![1.0, 0.5];
        let v = array![2.0, 1.0, 0.5];
        let m = u
            .view()
            .insert_axis(ndarray::Axis(1))
            .dot(&v.view().insert_axis(ndarray::Axis(0)));
        let t = rank1_approx(m.view()).unwrap();
        assert!(second_singular_ratio(m.view(), &t) < 1e-10);
    }

    /// Brute-force NNLS oracle: enumerate all active sets, solve, keep the
    /// best KKT-feasible point.
    pub(crate) fn nnls_oracle(a: &Array2<f64>, b: &Array1<f64>) -> Array1<f64> {
        let n = a.ncols();
        let gram = a.t().dot(a);
        let h = a.t().dot(b);
        let mut best: Option<(f64, Array1<f64>)> = None;
        for mask in 0..(1u32 << n) {
            let passive: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            let mut x = Array1::<f64>::zeros(n);
            if !passive.is_empty() {
                let (z, _) = solve_passive(&gram, &h, &passive);
                if z.iter().any(|&v| v < 0.0) {
                    continue;
                }
                for (&idx, &v) in passive.iter().zip(z.iter()) {
                    x[idx] = v;
                }
            }
            let grad = &h - &gram.dot(&x);
            let feasible = (0..n).all(|i| {
                if x[i] > 0.0 {
                    grad[i].abs() <= 1e-8 * h.iter().map(|v| v.abs()).fold(1.0, f64::max)
                } else {
                    grad[i] <= 1e-8 * h.iter().map(|v| v.abs()).fold(1.0, f64::max)
                }
            });
            if !feasible {
                continue;
            }
            let resid = a.dot(&x) - b;
            let obj = resid.dot(&resid);
            if best.as_ref().map_or(true, |(o, _)| obj < *o) {
                best = Some((obj, x));
            }
        }
        best.expect("oracle found no KKT point").1
    }

    #[test]
    fn nnls_unconstrained_optimum() {
        let a = Array2::eye(2);
        let b = array![1.0, 2.0];
        let sol = nnls(a.view(), b.view()).unwrap();
        assert_abs_diff_eq!(sol.x[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.x[1], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn nnls_fully_active() {
        let a = array![[1.0], [1.0]];
        let b = array![-1.0, -1.0];
        let sol = nnls(a.view(), b.view()).unwrap();
        assert_eq!(sol.x[0], 0.0);
    }

    #[test]
    fn nnls_matches_enumeration_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let a = Array2::from_shape_fn((4, 3), |_| rng.gen_range(-1.0..1.0));
            let b = Array1::from_shape_fn(4, |_| rng.gen_range(-1.0..1.0));
            let sol = nnls(a.view(), b.view()).unwrap();
            let oracle = nnls_oracle(&a, &b);
            let r1 = a.dot(&sol.x) - &b;
            let r2 = a.dot(&oracle) - &b;
            assert!(
                (r1.dot(&r1) - r2.dot(&r2)).abs() < 1e-10,
                "objective mismatch: {} vs {}",
                r1.dot(&r1),
                r2.dot(&r2)
            );
        }
    }

    #[test]
    fn nnls_objective_bounds() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(71);
        for _ in 0..20 {
            let a = Array2::from_shape_fn((5, 3), |_| rng.gen_range(-1.0..1.0));
            let b = Array1::from_shape_fn(5, |_| rng.gen_range(-1.0..1.0));
            let sol = nnls(a.view(), b.view()).unwrap();
            let obj = |x: &Array1<f64>| {
                let r = a.dot(x) - &b;
                r.dot(&r)
            };
            // No worse than the zero vector.
            assert!(obj(&sol.x) <= b.dot(&b) + 1e-12);
            // No worse than the clipped unconstrained solution.
            let gram = a.t().dot(&a);
            let h = a.t().dot(&b);
            if let Some(z) = cholesky_solve(&gram, h.as_slice().unwrap()) {
                let clipped = Array1::from_iter(z.iter().map(|&v| v.max(0.0)));
                assert!(obj(&sol.x) <= obj(&clipped) + 1e-10);
            }
        }
    }

    #[test]
    fn nnls_warm_start_agrees_with_cold() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(19);
        let a = Array2::from_shape_fn((6, 4), |_| rng.gen_range(-1.0..1.0));
        let b = Array1::from_shape_fn(6, |_| rng.gen_range(-1.0..1.0));
        let gram = a.t().dot(&a);
        let h = a.t().dot(&b);
        let cold = nnls_gram(&gram, &h, None).unwrap();
        let warm = nnls_gram(&gram, &h, Some(&cold.passive)).unwrap();
        for (x, y) in cold.x.iter().zip(warm.x.iter()) {
            assert_abs_diff_eq!(*x, *y, epsilon = 1e-10);
        }
    }

    #[test]
    fn cls_step_recovers_exact_model() {
        // X = c s^T with known non-negative factors.
        let c = array![1.0, 0.5, 2.0, 0.0, 3.0, 1.5];
        let s = array![0.2, 0.9, 0.4];
        let x = c
            .view()
            .insert_axis(ndarray::Axis(1))
            .dot(&s.view().insert_axis(ndarray::Axis(0)));
        let s_mat = s.view().insert_axis(ndarray::Axis(1)).to_owned();
        let est = cls_step_c(x.view(), s_mat.view(), None).unwrap();
        for (a, b) in est.column(0).iter().zip(c.iter()) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-10);
        }
    }

    #[test]
    fn cls_step_negative_row_goes_to_zero() {
        let s_mat = array![[1.0], [1.0]];
        let x = array![[-1.0, -2.0], [1.0, 1.0]];
        let est = cls_step_c(x.view(), s_mat.view(), None).unwrap();
        assert_eq!(est[[0, 0]], 0.0);
        assert!(est[[1, 0]] > 0.0);
    }

    #[test]
    fn cls_step_matches_row_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(29);
        let x = Array2::from_shape_fn((6, 4), |_| rng.gen_range(-0.5..1.0));
        let s = Array2::from_shape_fn((4, 2), |_| rng.gen_range(0.1..1.0));
        let est = cls_step_c(x.view(), s.view(), None).unwrap();
        for row in 0..6 {
            let b = x.row(row).to_owned();
            let oracle = nnls_oracle(&s, &b);
            let r_est = s.dot(&est.row(row).to_owned()) - &b;
            let r_or = s.dot(&oracle) - &b;
            assert!((r_est.dot(&r_est) - r_or.dot(&r_or)).abs() < 1e-10);
        }
    }

    #[test]
    fn cls_step_rejects_zero_column() {
        let s = array![[0.0, 1.0], [0.0, 1.0]];
        let x = Array2::ones((3, 2));
        assert!(matches!(
            cls_step_c(x.view(), s.view(), None),
            Err(Error::Degenerate(_))
        ));
    }
}
