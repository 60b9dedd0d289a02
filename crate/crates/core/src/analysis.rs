//! Convergence analysis of the series computed by an automaton: prefix and
//! tail masses through the resolvent `(I - M)^-1`, spectral radius, power
//! norms, and the absolute-convergence certificate.

use crate::automaton::MultiplicityAutomaton;
use crate::error::{Error, Result};
use crate::linalg::{self, dot, Matrix};
use crate::weight::Weight;
use crate::word::Word;

/// Resolvent queries are refused once `ρ(M) >= 1 - DIVERGENCE_MARGIN`.
pub const DIVERGENCE_MARGIN: f64 = 1e-9;

pub use crate::linalg::spectral_radius;

/// `ρ(M)` for the letter-summed matrix of `a`, computed in floating point.
pub fn letter_sum_radius<W: Weight>(a: &MultiplicityAutomaton<W>) -> f64 {
    spectral_radius(&a.letter_sum().map(|w| w.to_f64()))
}

/// Per-state total masses `s = (I - M)^-1 τ`, i.e. `s_q = r_{A,q}(Σ*)`.
///
/// Solved exactly in rational mode.
pub fn suffix_masses<W: Weight>(a: &MultiplicityAutomaton<W>) -> Result<Vec<W>> {
    let rho = letter_sum_radius(a);
    if !(rho < 1.0 - DIVERGENCE_MARGIN) {
        return Err(Error::Divergent { rho });
    }
    let n = a.n();
    let mut lhs = Matrix::<W>::identity(n);
    let m = a.letter_sum();
    for i in 0..n {
        for j in 0..n {
            let v = lhs.get(i, j).clone() - m.get(i, j).clone();
            lhs.set(i, j, v);
        }
    }
    linalg::solve(&lhs, a.tau())
        .ok_or_else(|| Error::Numerical("I - M is numerically singular".into()))
}

/// `r_A(uΣ*) = ι M_u (I - M)^-1 τ`.
pub fn prefix_weight<W: Weight>(a: &MultiplicityAutomaton<W>, u: &Word) -> Result<W> {
    let s = suffix_masses(a)?;
    Ok(dot(&a.forward(u)?, &s))
}

/// `r_A(Σ^{>=k}) = ι M^k (I - M)^-1 τ`; `tail_sum(a, 0)` is the total mass.
pub fn tail_sum<W: Weight>(a: &MultiplicityAutomaton<W>, k: usize) -> Result<W> {
    let s = suffix_masses(a)?;
    let m = a.letter_sum();
    let row = (0..k).fold(a.iota().to_vec(), |v, _| m.left_mul(&v));
    Ok(dot(&row, &s))
}

/// `‖M^k‖₂`, the largest singular value of the k-th power.
pub fn power_norm_decay(m: &Matrix<f64>, k: usize) -> f64 {
    linalg::norm2(&m.pow(k))
}

/// Sufficient check for absolute convergence of `Σ_w r_A(w)`.
///
/// `certified` means `ρ(M_abs) < 1` for `M_abs[i][j] = Σ_x |φ(q_i,x,q_j)|`,
/// and then `Σ_w |r_A(w)| <= abs_mass_bound`. An uncertified result is
/// inconclusive: the series may still converge absolutely.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    pub certified: bool,
    pub rho_abs: f64,
    pub abs_mass_bound: f64,
}

fn abs_parts<W: Weight>(a: &MultiplicityAutomaton<W>) -> (Vec<f64>, Matrix<f64>, Vec<f64>) {
    let n = a.n();
    let mut m = Matrix::<f64>::zeros(n, n);
    for letter in a.letters() {
        for i in 0..n {
            for j in 0..n {
                let v = m.get(i, j) + letter.get(i, j).to_f64().abs();
                m.set(i, j, v);
            }
        }
    }
    let abs = |v: &[W]| v.iter().map(|w| w.to_f64().abs()).collect::<Vec<_>>();
    (abs(a.iota()), m, abs(a.tau()))
}

pub fn absolute_convergence_certificate<W: Weight>(a: &MultiplicityAutomaton<W>) -> Certificate {
    let (iota, m_abs, tau) = abs_parts(a);
    let rho_abs = spectral_radius(&m_abs);
    let certified = rho_abs < 1.0 - DIVERGENCE_MARGIN;
    let abs_mass_bound = if certified {
        abs_resolvent(&m_abs, &tau)
            .map(|s| dot(&iota, &s))
            .unwrap_or(f64::INFINITY)
    } else {
        f64::INFINITY
    };
    Certificate { certified, rho_abs, abs_mass_bound }
}

/// `(I − M_abs)^-1 |τ|`: per state, an upper bound on the absolute mass
/// `Σ_w Σ_paths |weight|` of the paths leaving it. `None` when uncertified.
pub fn abs_suffix_masses<W: Weight>(a: &MultiplicityAutomaton<W>) -> Option<Vec<f64>> {
    let (_, m_abs, tau) = abs_parts(a);
    if !(spectral_radius(&m_abs) < 1.0 - DIVERGENCE_MARGIN) {
        return None;
    }
    abs_resolvent(&m_abs, &tau)
}

fn abs_resolvent(m_abs: &Matrix<f64>, tau: &[f64]) -> Option<Vec<f64>> {
    let n = m_abs.rows();
    let mut lhs = Matrix::<f64>::identity(n);
    for i in 0..n {
        for j in 0..n {
            lhs.set(i, j, lhs.get(i, j) - m_abs.get(i, j));
        }
    }
    linalg::solve(&lhs, tau)
}

/// Upper bound on `Σ_{|w| >= k} |r_A(w)|` from the certificate:
/// `|ι| M_abs^k (I - M_abs)^-1 |τ|`. `None` when uncertified.
pub fn abs_tail_bound<W: Weight>(a: &MultiplicityAutomaton<W>, k: usize) -> Option<f64> {
    let (iota, m_abs, tau) = abs_parts(a);
    if !(spectral_radius(&m_abs) < 1.0 - DIVERGENCE_MARGIN) {
        return None;
    }
    let s = abs_resolvent(&m_abs, &tau)?;
    let row = (0..k).fold(iota, |v, _| m_abs.left_mul(&v));
    Some(dot(&row, &s))
}
