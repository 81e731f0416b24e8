//! Piecewise functions on `[0, 1]` over the basis `{1/ν, 1, ν, ν², √ν}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients of `inv/ν + c0 + c1·ν + c2·ν² + sqrt·√ν`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Basis {
    pub inv: f64,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub sqrt: f64,
}

impl Basis {
    pub const ZERO: Basis = Basis { inv: 0.0, c0: 0.0, c1: 0.0, c2: 0.0, sqrt: 0.0 };

    pub fn constant(c0: f64) -> Self {
        Basis { c0, ..Self::ZERO }
    }

    pub fn linear(c0: f64, c1: f64) -> Self {
        Basis { c0, c1, ..Self::ZERO }
    }

    pub fn eval(&self, v: f64) -> f64 {
        let mut s = self.c0 + v * (self.c1 + v * self.c2);
        if self.inv != 0.0 {
            s += self.inv / v;
        }
        if self.sqrt != 0.0 {
            s += self.sqrt * v.sqrt();
        }
        s
    }

    /// `∫_lo^hi` of the combination; requires `lo > 0` when `inv ≠ 0`.
    pub fn integral(&self, lo: f64, hi: f64) -> f64 {
        let mut s = self.c0 * (hi - lo)
            + self.c1 * (hi * hi - lo * lo) / 2.0
            + self.c2 * (hi.powi(3) - lo.powi(3)) / 3.0
            + self.sqrt * 2.0 / 3.0 * (hi.powf(1.5) - lo.powf(1.5));
        if self.inv != 0.0 {
            s += self.inv * (hi / lo).ln();
        }
        s
    }

    fn scaled(&self, w: f64) -> Self {
        Basis {
            inv: w * self.inv,
            c0: w * self.c0,
            c1: w * self.c1,
            c2: w * self.c2,
            sqrt: w * self.sqrt,
        }
    }

    fn plus(&self, o: &Basis) -> Self {
        Basis {
            inv: self.inv + o.inv,
            c0: self.c0 + o.c0,
            c1: self.c1 + o.c1,
            c2: self.c2 + o.c2,
            sqrt: self.sqrt + o.sqrt,
        }
    }
}

/// One piece: `[lo, hi)`, or `[lo, hi]` for the last piece of a function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub f: Basis,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseFn {
    segments: Vec<Segment>,
}

impl PiecewiseFn {
    /// Validates and wraps `segments`: they must tile `[0, 1]` in order with
    /// `lo < hi`, and `1/ν` terms may not touch `ν = 0`.
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        let Some(first) = segments.first() else {
            return Err(Error::invariant("piecewise function has no segments"));
        };
        if first.lo != 0.0 {
            return Err(Error::invariant(format!("first segment starts at {}, not 0", first.lo)));
        }
        if segments.last().map(|s| s.hi) != Some(1.0) {
            return Err(Error::invariant("last segment does not end at 1"));
        }
        for (k, s) in segments.iter().enumerate() {
            let finite = [s.lo, s.hi, s.f.inv, s.f.c0, s.f.c1, s.f.c2, s.f.sqrt]
                .iter()
                .all(|v| v.is_finite());
            if !finite {
                return Err(Error::invariant(format!("segment {k} has a non-finite value")));
            }
            if !(s.lo < s.hi) {
                return Err(Error::invariant(format!("segment {k} is empty: [{}, {})", s.lo, s.hi)));
            }
            if s.f.inv != 0.0 && s.lo <= 0.0 {
                return Err(Error::invariant(format!("segment {k} has a 1/ν term at ν = 0")));
            }
            if k > 0 && segments[k - 1].hi != s.lo {
                return Err(Error::invariant(format!(
                    "segments {} and {k} overlap or leave a gap ({} vs {})",
                    k - 1,
                    segments[k - 1].hi,
                    s.lo
                )));
            }
        }
        Ok(Self { segments })
    }

    /// Builds a function from interior breakpoints `b_1 ≤ … ≤ b_{k−1}` and `k`
    /// pieces; pieces of zero width are dropped.
    pub fn from_pieces(breaks: &[f64], pieces: &[Basis]) -> Result<Self> {
        if pieces.len() != breaks.len() + 1 {
            return Err(Error::invariant("need exactly one more piece than breakpoints"));
        }
        let mut edges = Vec::with_capacity(breaks.len() + 2);
        edges.push(0.0);
        edges.extend_from_slice(breaks);
        edges.push(1.0);
        let segments = pieces
            .iter()
            .enumerate()
            .filter(|(k, _)| edges[*k] < edges[k + 1])
            .map(|(k, f)| Segment { lo: edges[k], hi: edges[k + 1], f: *f })
            .collect();
        Self::new(segments)
    }

    pub fn constant(c: f64) -> Self {
        Self::from_pieces(&[], &[Basis::constant(c)]).expect("constant is valid")
    }

    pub fn linear(c0: f64, c1: f64) -> Self {
        Self::from_pieces(&[], &[Basis::linear(c0, c1)]).expect("line is valid")
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Interior breakpoints.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.segments[1..].iter().map(|s| s.lo).collect()
    }

    fn segment_at(&self, v: f64) -> &Segment {
        let k = self.segments.partition_point(|s| s.lo <= v);
        &self.segments[k.saturating_sub(1)]
    }

    pub fn eval(&self, v: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::domain(format!("evaluation point {v} is outside [0, 1]")));
        }
        Ok(self.at(v))
    }

    /// Unchecked evaluation for callers that already hold a point of `[0, 1]`.
    pub fn at(&self, v: f64) -> f64 {
        debug_assert!((0.0..=1.0).contains(&v));
        self.segment_at(v).f.eval(v)
    }

    pub fn sample(&self, points: &[f64]) -> Vec<f64> {
        points.iter().map(|&v| self.at(v)).collect()
    }

    /// `r(ν) = ν − p(ν)` on the same breakpoints; applying it twice gives `p`.
    pub fn reward_from_payment(&self) -> PiecewiseFn {
        let segments = self
            .segments
            .iter()
            .map(|s| Segment {
                f: Basis {
                    inv: -s.f.inv,
                    c0: -s.f.c0,
                    c1: 1.0 - s.f.c1,
                    c2: -s.f.c2,
                    sqrt: -s.f.sqrt,
                },
                ..*s
            })
            .collect();
        PiecewiseFn { segments }
    }

    /// `∫_0^1 f(ν) dν`, exact per segment.
    pub fn integral(&self) -> f64 {
        self.segments.iter().map(|s| s.f.integral(s.lo, s.hi)).sum()
    }

    /// Largest jump across interior breakpoints.
    pub fn max_jump(&self) -> f64 {
        self.segments
            .windows(2)
            .map(|w| (w[0].f.eval(w[1].lo) - w[1].f.eval(w[1].lo)).abs())
            .fold(0.0, f64::max)
    }

    /// `ν·f(ν)`; fails if a piece has a `ν²` or `√ν` term, which would leave
    /// the basis.
    pub fn times_nu(&self) -> Result<PiecewiseFn> {
        let mut segments = Vec::with_capacity(self.segments.len());
        for s in &self.segments {
            if s.f.c2 != 0.0 || s.f.sqrt != 0.0 {
                return Err(Error::invariant("ν·f leaves the {1/ν, 1, ν, ν², √ν} basis"));
            }
            segments.push(Segment {
                f: Basis { inv: 0.0, c0: s.f.inv, c1: s.f.c0, c2: s.f.c1, sqrt: 0.0 },
                ..*s
            });
        }
        Ok(PiecewiseFn { segments })
    }

    /// Glues functions together: `parts[k].1` is used from `parts[k].0` up to
    /// the next start. The first start must be 0 and starts must not decrease.
    pub fn splice(parts: &[(f64, &PiecewiseFn)]) -> Result<PiecewiseFn> {
        let mut segments: Vec<Segment> = Vec::new();
        for (k, &(start, f)) in parts.iter().enumerate() {
            let end = parts.get(k + 1).map_or(1.0, |p| p.0);
            for s in &f.segments {
                let (lo, hi) = (s.lo.max(start), s.hi.min(end));
                if lo < hi {
                    segments.push(Segment { lo, hi, f: s.f });
                }
            }
        }
        Self::new(segments)
    }

    /// `wa·a + wb·b` on the union of both breakpoint sets.
    pub fn combine(a: &PiecewiseFn, wa: f64, b: &PiecewiseFn, wb: f64) -> PiecewiseFn {
        let mut edges: Vec<f64> = a
            .segments
            .iter()
            .chain(&b.segments)
            .flat_map(|s| [s.lo, s.hi])
            .collect();
        edges.sort_by(f64::total_cmp);
        edges.dedup();
        let segments = edges
            .windows(2)
            .map(|e| {
                let fa = a.segment_at(e[0]).f.scaled(wa);
                let fb = b.segment_at(e[0]).f.scaled(wb);
                Segment { lo: e[0], hi: e[1], f: fa.plus(&fb) }
            })
            .collect();
        PiecewiseFn { segments }
    }
}
