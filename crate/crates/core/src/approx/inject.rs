use super::ApproxError;
use crate::gallery::{FamilyKind, PencilFamily};
use crate::matkernel::{CMatrix, C64};
use crate::ranges::{ess_range_tail, PencilSection, TailOptions};
use crate::region::Rect;

/// `x = α e_j + β e_k` with `⟨(A − μB)x, x⟩ = 0` (indices 1-based).
#[derive(Debug, Clone, PartialEq)]
pub struct InjectedVector {
    pub target: C64,
    pub j: usize,
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Injection {
    pub base_n: usize,
    pub vectors: Vec<InjectedVector>,
    /// Targets that already were eigenvalues of the base compression.
    pub noop: Vec<C64>,
    /// Compression to `span{e_1, …, e_base_n} ⊕ span{x_1, …}`.
    pub section: PencilSection,
}

/// Adds, for every target `μ`, one unit vector from the tail of a diagonal
/// family on which the pencil's quadratic form vanishes, so that `μ`
/// becomes an eigenvalue of the compression. Every target is first checked
/// against a tail estimate of `W_e(A,B)`.
pub fn inject_pollution(
    family: &PencilFamily,
    base_n: usize,
    targets: &[C64],
    search_depth: usize,
) -> Result<Injection, ApproxError> {
    let FamilyKind::Diagonal { a, b } = &family.kind else {
        return Err(ApproxError::NotDiagonal(family.name.clone()));
    };
    if base_n == 0 || search_depth < 2 {
        return Err(ApproxError::InvalidSweep(
            "base_n ≥ 1 and search_depth ≥ 2 required".into(),
        ));
    }
    let coeff = |i: usize| (a.eval(i as f64), b.eval(i as f64));
    let half = (search_depth / 2).max(1);
    let tail = TailOptions::new(vec![base_n, base_n + half], half);
    for &mu in targets {
        let h = 1.5e-3;
        let rect = Rect::new(mu.re - h, mu.re + h, mu.im - h, mu.im + h)?;
        let r = ess_range_tail(family, rect, 3, 3, &tail)?;
        if !r.get(1, 1) {
            return Err(ApproxError::TargetOutsideEssentialRange { target: mu });
        }
    }

    let mut diag_a: Vec<C64> = (1..=base_n).map(|i| coeff(i).0).collect();
    let mut diag_b: Vec<C64> = (1..=base_n).map(|i| coeff(i).1).collect();
    let mut vectors = Vec::new();
    let mut noop = Vec::new();
    let mut start = base_n + 1;
    for &mu in targets {
        let already = (1..=base_n).any(|i| {
            let (ai, bi) = coeff(i);
            (ai - mu * bi).norm() <= 1e-12 * ai.norm().max((mu * bi).norm()).max(1.0)
        });
        if already {
            noop.push(mu);
            continue;
        }
        let c: Vec<C64> = (start..start + search_depth)
            .map(|i| {
                let (ai, bi) = coeff(i);
                ai - mu * bi
            })
            .collect();
        let pair = find_pair(&c).ok_or(ApproxError::NoOppositePair { target: mu })?;
        let (j, k, t) = (start + pair.0, start + pair.1, pair.2);
        let (alpha, beta) = (t.sqrt(), (1.0 - t).sqrt());
        let (aj, bj) = coeff(j);
        let (ak, bk) = coeff(k);
        diag_a.push(aj * t + ak * (1.0 - t));
        diag_b.push(bj * t + bk * (1.0 - t));
        vectors.push(InjectedVector {
            target: mu,
            j,
            k,
            alpha,
            beta,
        });
        start = j.max(k) + 1;
    }
    let section = PencilSection::new(CMatrix::from_diag(&diag_a), CMatrix::from_diag(&diag_b))?;
    Ok(Injection {
        base_n,
        vectors,
        noop,
        section,
    })
}

/// First `(j, k, t)` with `t·c_j + (1−t)·c_k = 0`, `t ∈ [0, 1]`; a zero entry
/// pairs with itself.
fn find_pair(c: &[C64]) -> Option<(usize, usize, f64)> {
    for (j, &cj) in c.iter().enumerate() {
        if cj.norm() == 0.0 {
            return Some((j, j, 1.0));
        }
        for (k, &ck) in c.iter().enumerate().skip(j + 1) {
            let scale = cj.norm() * ck.norm();
            let cross = cj.re * ck.im - cj.im * ck.re;
            let dot = (cj * ck.conj()).re;
            if dot < 0.0 && cross.abs() <= 1e-12 * scale {
                let t = ck.norm() / (cj.norm() + ck.norm());
                let residual = (cj * t + ck * (1.0 - t)).norm();
                if residual <= 1e-9 * cj.norm().max(ck.norm()) {
                    return Some((j, k, t));
                }
            }
        }
    }
    None
}
