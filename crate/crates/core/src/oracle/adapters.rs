use crate::error::{Result, TarskiError};
use crate::lattice::{GridBox, Point, SignVector};

use super::{FnOracle, SignOracle, DEBUG_LABEL};

/// `g(x) = (s_1, .., s_{i-1}, s_{i+1}, .., s_{k+1}, s_i)` where
/// `s_j = sgn(f(x')_j - x'_j)` and `x'` is `x` with `value` inserted at `dim`.
pub struct SliceOracle<'a> {
    f: &'a mut FnOracle,
    dim: usize,
    value: i64,
    domain: GridBox,
}

/// Fixes coordinate `dim` of `f` to `value`. The sliced dimension's sign is
/// always reported last.
pub fn slice_oracle(f: &mut FnOracle, dim: usize, value: i64) -> Result<SliceOracle<'_>> {
    let full = f.domain().clone();
    if dim >= full.dim() {
        return Err(TarskiError::usage(format!(
            "slice dimension {dim} out of range for a {}-dimensional map",
            full.dim()
        )));
    }
    if full.dim() < 2 {
        return Err(TarskiError::usage("cannot slice a 1-dimensional map"));
    }
    if value < full.lo()[dim] || value > full.hi()[dim] {
        return Err(TarskiError::usage(format!(
            "slice value {value} outside [{}, {}]",
            full.lo()[dim],
            full.hi()[dim]
        )));
    }
    Ok(SliceOracle {
        domain: full.without(dim)?,
        f,
        dim,
        value,
    })
}

impl SliceOracle<'_> {
    /// Lifts a point of the slice back into the full box.
    pub fn lift(&self, x: &Point) -> Point {
        x.with_inserted(self.dim, self.value)
    }
}

impl SignOracle for SliceOracle<'_> {
    fn domain(&self) -> &GridBox {
        &self.domain
    }

    fn label(&self) -> &'static str {
        "slice"
    }

    fn query_labeled(&mut self, x: &Point, label: &'static str) -> Result<SignVector> {
        self.domain.check_contains(x)?;
        let full = self.lift(x);
        let y = self.f.eval_labeled(&full, label)?;
        let mut diffs: Vec<i64> = (0..full.dim()).map(|j| y[j] - full[j]).collect();
        let sliced = diffs.remove(self.dim);
        diffs.push(sliced);
        Ok(SignVector::from_diffs(diffs))
    }
}

/// `o` restricted to a sub-box.
pub struct Restricted<'a> {
    inner: &'a mut dyn SignOracle,
    domain: GridBox,
}

/// Restricts `o` to `sub`. The range condition on `sub` follows from corner
/// certificates `g(sub.lo)_t >= 0`, `g(sub.hi)_t <= 0` (`t < k`); with
/// `check_certificates` they are verified by two debug-labelled queries.
pub fn box_restriction<'a>(
    o: &'a mut dyn SignOracle,
    sub: GridBox,
    check_certificates: bool,
) -> Result<Restricted<'a>> {
    if sub.dim() != o.domain().dim() {
        return Err(TarskiError::DimensionMismatch {
            expected: o.domain().dim(),
            found: sub.dim(),
        });
    }
    if !sub.is_subbox_of(o.domain()) {
        return Err(TarskiError::usage(format!(
            "{sub} is not inside {}",
            o.domain()
        )));
    }
    if check_certificates {
        let k = sub.dim();
        let at_lo = o.query_labeled(sub.lo(), DEBUG_LABEL)?;
        if let Some(t) = (0..k).find(|&t| at_lo.get(t) < 0) {
            return Err(TarskiError::invalid(format!(
                "corner certificate failed: g{}_{} = -1 at the lower corner of {sub}",
                sub.lo(),
                t + 1
            )));
        }
        let at_hi = o.query_labeled(sub.hi(), DEBUG_LABEL)?;
        if let Some(t) = (0..k).find(|&t| at_hi.get(t) > 0) {
            return Err(TarskiError::invalid(format!(
                "corner certificate failed: g{}_{} = +1 at the upper corner of {sub}",
                sub.hi(),
                t + 1
            )));
        }
    }
    Ok(Restricted {
        inner: o,
        domain: sub,
    })
}

impl SignOracle for Restricted<'_> {
    fn domain(&self) -> &GridBox {
        &self.domain
    }

    fn outputs(&self) -> usize {
        self.inner.outputs()
    }

    fn label(&self) -> &'static str {
        "restrict"
    }

    fn query_labeled(&mut self, x: &Point, label: &'static str) -> Result<SignVector> {
        self.domain.check_contains(x)?;
        self.inner.query_labeled(x, label)
    }
}

/// `g_j(x) = (g(x,q)_1, .., g(x,q)_a, g(x,q)_j)` for a fixed suffix `q`.
pub struct ProjectLast<'a> {
    inner: &'a mut dyn SignOracle,
    suffix: Point,
    output: usize,
    domain: GridBox,
}

/// Builds `g_j` over the first `a = dim(g) - dim(suffix)` coordinates.
/// `output` is the 0-based index of the kept extra sign, in `a..=a+b`.
pub fn project_last<'a>(
    g: &'a mut dyn SignOracle,
    suffix: Point,
    output: usize,
) -> Result<ProjectLast<'a>> {
    let total = g.domain().dim();
    let b = suffix.dim();
    if b == 0 || b >= total {
        return Err(TarskiError::usage(format!(
            "suffix of length {b} cannot split a {total}-dimensional oracle"
        )));
    }
    let a = total - b;
    if output < a || output > total {
        return Err(TarskiError::usage(format!(
            "projected output {output} outside {a}..={total}"
        )));
    }
    let (prefix_box, suffix_box) = g.domain().split_at(a)?;
    suffix_box.check_contains(&suffix)?;
    Ok(ProjectLast {
        inner: g,
        suffix,
        output,
        domain: prefix_box,
    })
}

impl SignOracle for ProjectLast<'_> {
    fn domain(&self) -> &GridBox {
        &self.domain
    }

    fn label(&self) -> &'static str {
        "project"
    }

    fn query_labeled(&mut self, x: &Point, label: &'static str) -> Result<SignVector> {
        self.domain.check_contains(x)?;
        let full = self.inner.query_labeled(&x.concat(&self.suffix), label)?;
        let a = self.domain.dim();
        let mut signs = full.as_slice()[..a].to_vec();
        signs.push(full.get(self.output));
        SignVector::new(signs)
    }
}

/// `g⁺` (`up`) or `g⁻` (`!up`): the last sign collapsed to `{-1, +1}`.
pub struct CollapseLast<'a> {
    inner: &'a mut dyn SignOracle,
    up: bool,
}

/// Last sign: `{0, +1} -> +1`, `-1 -> -1`.
pub fn collapse_last_up(o: &mut dyn SignOracle) -> CollapseLast<'_> {
    CollapseLast { inner: o, up: true }
}

/// Last sign: `{0, -1} -> -1`, `+1 -> +1`.
pub fn collapse_last_down(o: &mut dyn SignOracle) -> CollapseLast<'_> {
    CollapseLast {
        inner: o,
        up: false,
    }
}

impl SignOracle for CollapseLast<'_> {
    fn domain(&self) -> &GridBox {
        self.inner.domain()
    }

    fn outputs(&self) -> usize {
        self.inner.outputs()
    }

    fn label(&self) -> &'static str {
        if self.up {
            "collapse-up"
        } else {
            "collapse-down"
        }
    }

    fn query_labeled(&mut self, x: &Point, label: &'static str) -> Result<SignVector> {
        let mut v = self.inner.query_labeled(x, label)?;
        let last = v.len() - 1;
        let s = v.get(last);
        let collapsed = match (self.up, s) {
            (true, 0) => 1,
            (false, 0) => -1,
            (_, s) => s,
        };
        v.set(last, collapsed);
        Ok(v)
    }
}
