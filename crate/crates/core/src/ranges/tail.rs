//! Essential numerical range from compressions to tail windows of a family's
//! coordinate basis.

use super::{pencil_range, PencilSection, RangeError};
use crate::gallery::{PencilFamily, TruncationSpec};
use crate::matkernel::hpd_invsqrt;
use crate::region::{Raster, Rect};

#[derive(Debug, Clone, PartialEq)]
pub struct TailOptions {
    /// Window start offsets `m`: for sequence families the window is
    /// `e_{m+1}, …, e_{m+w}`; for differential families `m` counts grid
    /// nodes in from each end of the interval.
    pub depths: Vec<usize>,
    pub window: usize,
    /// Section used for differential families (ignored for sequences).
    pub truncation: Option<TruncationSpec>,
    /// Compress `B^{−1/2}AB^{−1/2}` against `I` instead of the pencil; this
    /// estimates the ratio range `w_e` rather than `W_e`. Needs positive
    /// definite windows of `B`.
    pub ratio: bool,
}

impl TailOptions {
    pub fn new(depths: Vec<usize>, window: usize) -> Self {
        Self {
            depths,
            window,
            truncation: None,
            ratio: false,
        }
    }
}

/// Outer raster estimate of `W_e(A,B)`: the intersection over depths of the
/// pencil ranges of the windowed compressions.
pub fn ess_range_tail(
    family: &PencilFamily,
    rect: Rect,
    nx: usize,
    ny: usize,
    opts: &TailOptions,
) -> Result<Raster, RangeError> {
    if opts.depths.is_empty() || opts.window == 0 {
        return Err(RangeError::InvalidWindow(
            "need at least one depth and a positive window".into(),
        ));
    }
    let comps = family.components();
    let mut acc: Option<Raster> = None;
    for &m in &opts.depths {
        let w = opts.window;
        let (section, per_comp, idx): (PencilSection, usize, Vec<usize>) = if family.is_sequence() {
            let per = m + w;
            let p = family.section(&TruncationSpec::Diagonal { n: comps * per })?;
            (p, per, (m..m + w).collect())
        } else {
            let t = opts.truncation.ok_or_else(|| {
                RangeError::UnsupportedFamily(format!(
                    "'{}' needs an interval truncation for tail windows",
                    family.name
                ))
            })?;
            if !matches!(t, TruncationSpec::Interval { .. }) {
                return Err(RangeError::UnsupportedFamily(format!(
                    "'{}' is differential; got {t:?}",
                    family.name
                )));
            }
            let n = t.size();
            if 2 * (m + w) > n {
                return Err(RangeError::InvalidWindow(format!(
                    "depth {m} + window {w} from both ends exceeds {n} nodes"
                )));
            }
            let p = family.section(&t)?;
            let left = m..m + w;
            let right = n - m - w..n - m;
            (p, n, left.chain(right).collect())
        };
        let full: Vec<usize> = (0..comps)
            .flat_map(|c| idx.iter().map(move |&i| c * per_comp + i))
            .collect();
        let mut window = section.compress(&full);
        if opts.ratio {
            let s = hpd_invsqrt(&window.b)?;
            window = PencilSection::operator(s.matmul(&window.a).matmul(&s));
        }
        let r = pencil_range(&window, rect, nx, ny)?;
        acc = Some(match acc {
            None => r,
            Some(prev) => prev.intersect(&r)?,
        });
    }
    Ok(acc.expect("depths is non-empty"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{jt_operator, notclosed, sl_indefinite, Coefficient};
    use crate::matkernel::C64;

    #[test]
    fn jt_operator_tail_covers_real_line() {
        let rect = Rect::symmetric(-5.0, 5.0, 0.25);
        let r = ess_range_tail(&jt_operator(), rect, 100, 5, &TailOptions::new(vec![20, 40], 40)).unwrap();
        for ix in 0..100 {
            assert!(r.get(ix, 2));
            assert!(!r.get(ix, 0));
        }
    }

    #[test]
    fn notclosed_tail_misses_only_origin() {
        let rect = Rect::symmetric(-2.0, 2.0, 0.02);
        let r = ess_range_tail(&notclosed(), rect, 201, 3, &TailOptions::new(vec![50, 100, 200], 100)).unwrap();
        let row = 1;
        for ix in 0..201 {
            let z = r.center(ix, row);
            if z.re.abs() > 0.1 {
                assert!(r.get(ix, row), "{z}");
            }
        }
        assert!(!r.contains(C64::new(0.0, 0.0)));
    }

    #[test]
    fn sl_tail_has_gap() {
        let f = sl_indefinite(1.0, 1.0, Coefficient::real(0.0), 0.0, 0.0).unwrap();
        // a window of length ℓ only sees values from 1 + π²/ℓ² on
        let mut opts = TailOptions::new(vec![0, 10], 380);
        opts.truncation = Some(TruncationSpec::Interval {
            half_length: 10.0,
            points: 799,
        });
        let rect = Rect::symmetric(-3.0, 3.0, 0.03);
        let r = ess_range_tail(&f, rect, 61, 3, &opts).unwrap();
        for ix in 0..61 {
            let z = r.center(ix, 1);
            if z.re.abs() >= 1.0 + 0.2 {
                assert!(r.get(ix, 1), "{z}");
            }
            if z.re.abs() <= 0.9 {
                assert!(!r.get(ix, 1), "{z}");
            }
        }
    }

    #[test]
    fn unsupported_without_interval() {
        let f = sl_indefinite(1.0, 1.0, Coefficient::real(0.0), 0.0, 0.0).unwrap();
        let rect = Rect::symmetric(-1.0, 1.0, 1.0);
        let e = ess_range_tail(&f, rect, 4, 4, &TailOptions::new(vec![0], 4)).unwrap_err();
        assert!(matches!(e, RangeError::UnsupportedFamily(_)));
    }
}
