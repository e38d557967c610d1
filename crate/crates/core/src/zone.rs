//! Clock zones as difference bound matrices.
//!
//! A zone over `n` clocks is stored as an `(n + 1) x (n + 1)` matrix whose
//! entry `(i, j)` bounds the difference `x_i - x_j`. Index 0 is the constant
//! zero clock, so `(i, 0)` is an upper bound on `x_i` and `(0, i)` bounds
//! `-x_i`. Every public operation returns a zone in canonical form, the
//! shortest-path closure of the constraint graph.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::time::Ticks;

/// An upper bound `(value, strictness)` on a clock difference.
///
/// Encoded as `2 * value + 1` for `<=` and `2 * value` for `<`, so that the
/// integer order coincides with bound tightness: `(v, <=) > (v, <) > (v - 1, <=)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Bound(i64);

const INF_RAW: i64 = i64::MAX & !1;
// Keeps finite sums clear of the infinity encoding.
const MAX_VALUE: i64 = 1 << 60;

impl Bound {
    pub const INFINITY: Bound = Bound(INF_RAW);
    /// `(0, <=)`, the diagonal entry of every non-empty zone.
    pub const LE_ZERO: Bound = Bound(1);
    /// `(0, <)`.
    pub const LT_ZERO: Bound = Bound(0);

    pub fn le(value: Ticks) -> Bound {
        assert!(value.abs() < MAX_VALUE, "bound {value} out of range");
        Bound((value << 1) | 1)
    }

    pub fn lt(value: Ticks) -> Bound {
        assert!(value.abs() < MAX_VALUE, "bound {value} out of range");
        Bound(value << 1)
    }

    pub fn new(value: Ticks, strict: bool) -> Bound {
        if strict {
            Bound::lt(value)
        } else {
            Bound::le(value)
        }
    }

    pub fn is_infinite(self) -> bool {
        self.0 == INF_RAW
    }

    /// The constant of a finite bound.
    pub fn value(self) -> Option<Ticks> {
        (!self.is_infinite()).then_some(self.0 >> 1)
    }

    pub fn is_strict(self) -> bool {
        self.0 & 1 == 0
    }

    /// Bound of the complementary constraint with swapped operands:
    /// `not (a - b <= c)` is `b - a < -c`.
    pub fn complement(self) -> Bound {
        assert!(!self.is_infinite(), "complement of infinity");
        let value = -(self.0 >> 1);
        if self.is_strict() {
            Bound::le(value)
        } else {
            Bound::lt(value)
        }
    }

    fn relation(self) -> &'static str {
        if self.is_strict() {
            "<"
        } else {
            "<="
        }
    }
}

/// Bound on the sum of two differences.
impl std::ops::Add for Bound {
    type Output = Bound;

    fn add(self, other: Bound) -> Bound {
        if self.is_infinite() || other.is_infinite() {
            return Bound::INFINITY;
        }
        let value = (self.0 >> 1) + (other.0 >> 1);
        Bound((value << 1) | (self.0 & other.0 & 1))
    }
}

impl fmt::Debug for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            None => write!(f, "(inf, <)"),
            Some(v) => write!(f, "({v}, {})", self.relation()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum ZoneError {
    #[error("operation requires a non-empty zone")]
    Empty,
}

/// A convex set of clock valuations.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Zone {
    dim: usize,
    matrix: Vec<Bound>,
    canonical: bool,
}

impl Zone {
    /// The single valuation where every clock is zero.
    pub fn zero(dim: usize) -> Zone {
        assert!(dim >= 1, "a zone has at least the zero clock");
        Zone {
            dim,
            matrix: vec![Bound::LE_ZERO; dim * dim],
            canonical: true,
        }
    }

    /// All valuations with non-negative clocks.
    pub fn universe(dim: usize) -> Zone {
        assert!(dim >= 1, "a zone has at least the zero clock");
        let mut matrix = vec![Bound::INFINITY; dim * dim];
        for i in 0..dim {
            matrix[i * dim + i] = Bound::LE_ZERO;
            matrix[i] = Bound::LE_ZERO;
        }
        Zone {
            dim,
            matrix,
            canonical: true,
        }
    }

    /// The canonical empty zone of the given dimension.
    pub fn empty(dim: usize) -> Zone {
        Zone {
            dim,
            matrix: vec![Bound::lt(-1); dim * dim],
            canonical: true,
        }
    }

    /// Builds a zone from raw `(i, j, bound)` entries meaning
    /// `x_i - x_j ≺ bound`, intersected with the non-negative orthant.
    pub fn from_constraints<I>(dim: usize, constraints: I) -> Zone
    where
        I: IntoIterator<Item = (usize, usize, Bound)>,
    {
        let mut z = Zone::universe(dim);
        for (i, j, b) in constraints {
            z.check_index(i);
            z.check_index(j);
            let idx = z.idx(i, j);
            if b < z.matrix[idx] {
                z.matrix[idx] = b;
            }
        }
        z.canonical = false;
        z.close();
        z
    }

    /// Builds a zone directly from a matrix in row-major order. The result
    /// is not canonical until [`Zone::canonicalize`] is applied.
    pub fn from_matrix(dim: usize, matrix: Vec<Bound>) -> Zone {
        assert_eq!(matrix.len(), dim * dim, "matrix shape mismatch");
        Zone {
            dim,
            matrix,
            canonical: false,
        }
    }

    /// Number of clocks including the zero clock.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.dim + j
    }

    fn check_index(&self, i: usize) {
        assert!(i < self.dim, "clock index {i} out of range for dim {}", self.dim);
    }

    /// Entry bounding `x_i - x_j`.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Bound {
        self.matrix[self.idx(i, j)]
    }

    /// Upper bound on clock `i`.
    pub fn upper(&self, i: usize) -> Bound {
        self.get(i, 0)
    }

    /// Lower bound on clock `i` as `(value, strict)`.
    pub fn lower(&self, i: usize) -> (Ticks, bool) {
        let b = self.get(0, i);
        (-b.value().expect("lower bounds are finite"), b.is_strict())
    }

    pub fn is_empty(&self) -> bool {
        if self.canonical {
            self.matrix[0] < Bound::LE_ZERO
        } else {
            self.canonicalize().is_empty()
        }
    }

    /// Shortest-path closure. Idempotent; an inconsistent matrix yields the
    /// canonical empty zone.
    pub fn canonicalize(&self) -> Zone {
        let mut z = self.clone();
        z.canonical = false;
        z.close();
        z
    }

    fn close(&mut self) {
        if self.canonical {
            return;
        }
        let n = self.dim;
        for k in 0..n {
            for i in 0..n {
                let ik = self.matrix[i * n + k];
                if ik.is_infinite() {
                    continue;
                }
                for j in 0..n {
                    let candidate = ik + self.matrix[k * n + j];
                    if candidate < self.matrix[i * n + j] {
                        self.matrix[i * n + j] = candidate;
                    }
                }
            }
            if self.matrix[k * n + k] < Bound::LE_ZERO {
                self.set_empty();
                return;
            }
        }
        if (0..n).any(|i| self.matrix[i * n + i] < Bound::LE_ZERO) {
            self.set_empty();
            return;
        }
        self.canonical = true;
    }

    fn set_empty(&mut self) {
        *self = Zone::empty(self.dim);
    }

    /// Delay: lifts every upper bound on individual clocks.
    pub fn up(&self) -> Result<Zone, ZoneError> {
        let mut z = self.nonempty_canonical()?;
        for i in 1..z.dim {
            let idx = z.idx(i, 0);
            z.matrix[idx] = Bound::INFINITY;
        }
        Ok(z)
    }

    /// Intersection with the single constraint `x_i - x_j ≺ bound`.
    pub fn constrain_raw(&self, i: usize, j: usize, bound: Bound) -> Zone {
        self.check_index(i);
        self.check_index(j);
        let mut z = if self.canonical {
            self.clone()
        } else {
            self.canonicalize()
        };
        if z.is_empty() || bound.is_infinite() {
            return z;
        }
        if i == j {
            if bound < Bound::LE_ZERO {
                z.set_empty();
            }
            return z;
        }
        if z.get(j, i) + bound < Bound::LE_ZERO {
            z.set_empty();
            return z;
        }
        if bound >= z.get(i, j) {
            return z;
        }
        let n = z.dim;
        let ij = z.idx(i, j);
        z.matrix[ij] = bound;
        for pivot in [i, j] {
            for k in 0..n {
                let kp = z.matrix[k * n + pivot];
                if kp.is_infinite() {
                    continue;
                }
                for l in 0..n {
                    let candidate = kp + z.matrix[pivot * n + l];
                    if candidate < z.matrix[k * n + l] {
                        z.matrix[k * n + l] = candidate;
                    }
                }
            }
        }
        z
    }

    /// Intersection with a clock constraint whose clock indices are already
    /// expressed in this zone's numbering.
    pub fn constrain(&self, c: &crate::ta::ClockConstraint) -> Zone {
        self.constrain_raw(c.left.get(), c.right.get(), c.bound)
    }

    /// Whether the intersection with `x_i - x_j ≺ bound` is non-empty.
    pub fn intersects_raw(&self, i: usize, j: usize, bound: Bound) -> bool {
        !self.is_empty() && (i == j || self.get(j, i) + bound >= Bound::LE_ZERO)
    }

    /// Pins each listed clock to zero.
    pub fn reset(&self, clocks: &[usize]) -> Result<Zone, ZoneError> {
        let mut z = self.nonempty_canonical()?;
        let n = z.dim;
        for &x in clocks {
            assert!(x != 0 && x < n, "cannot reset clock index {x}");
            for j in 0..n {
                z.matrix[x * n + j] = z.matrix[j];
                z.matrix[j * n + x] = z.matrix[j * n];
            }
            z.matrix[x * n + x] = Bound::LE_ZERO;
        }
        Ok(z)
    }

    /// Removes every constraint on clock `x` except `x >= 0`.
    pub fn free(&self, x: usize) -> Result<Zone, ZoneError> {
        let mut z = self.nonempty_canonical()?;
        let n = z.dim;
        assert!(x != 0 && x < n, "cannot free clock index {x}");
        for j in 0..n {
            if j != x {
                z.matrix[x * n + j] = Bound::INFINITY;
                z.matrix[j * n + x] = z.matrix[j * n];
            }
        }
        Ok(z)
    }

    /// True iff every valuation of `other` lies in `self`.
    pub fn includes(&self, other: &Zone) -> bool {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let a = self.canonicalize_if_needed();
        let b = other.canonicalize_if_needed();
        if b.is_empty() {
            return true;
        }
        if a.is_empty() {
            return false;
        }
        a.matrix.iter().zip(&b.matrix).all(|(x, y)| y <= x)
    }

    fn canonicalize_if_needed(&self) -> std::borrow::Cow<'_, Zone> {
        if self.canonical {
            std::borrow::Cow::Borrowed(self)
        } else {
            std::borrow::Cow::Owned(self.canonicalize())
        }
    }

    /// Classic maximal-constant normalisation. `max_consts[i]` must be at
    /// least every constant compared against clock `i`; entry 0 is ignored.
    pub fn extrapolate(&self, max_consts: &[Ticks]) -> Zone {
        assert_eq!(max_consts.len(), self.dim, "one constant per clock");
        let mut z = self.canonicalize_if_needed().into_owned();
        if z.is_empty() {
            return z;
        }
        let n = z.dim;
        let k = |i: usize| if i == 0 { 0 } else { max_consts[i] };
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let b = z.matrix[i * n + j];
                if b.is_infinite() {
                    continue;
                }
                if b > Bound::le(k(i)) {
                    z.matrix[i * n + j] = Bound::INFINITY;
                    changed = true;
                } else if b < Bound::lt(-k(j)) {
                    z.matrix[i * n + j] = Bound::lt(-k(j));
                    changed = true;
                }
            }
        }
        if changed {
            z.canonical = false;
            z.close();
        }
        z
    }

    /// True iff no clock has a finite upper bound, i.e. time can diverge.
    pub fn is_time_unbounded(&self) -> bool {
        (1..self.dim).all(|i| self.upper(i).is_infinite())
    }

    fn nonempty_canonical(&self) -> Result<Zone, ZoneError> {
        let z = self.canonicalize_if_needed().into_owned();
        if z.is_empty() {
            Err(ZoneError::Empty)
        } else {
            Ok(z)
        }
    }

    /// Renders the zone as a conjunction of constraints over the given clock
    /// names (`names[i]` for index `i + 1`).
    pub fn render(&self, names: &[&str]) -> String {
        assert_eq!(names.len() + 1, self.dim, "one name per clock");
        let z = self.canonicalize_if_needed();
        if z.is_empty() {
            return "false".to_string();
        }
        let mut parts = Vec::new();
        for i in 1..z.dim {
            let upper = z.get(i, 0);
            let lower = z.get(0, i);
            if let Some(part) = render_range(names[i - 1], lower, upper, true) {
                parts.push(part);
            }
        }
        for i in 1..z.dim {
            for j in (i + 1)..z.dim {
                let term = format!("{} - {}", names[i - 1], names[j - 1]);
                let implied = |a: usize, b: usize| z.get(a, 0) + z.get(0, b);
                let upper = if z.get(i, j) == implied(i, j) {
                    Bound::INFINITY
                } else {
                    z.get(i, j)
                };
                let lower = if z.get(j, i) == implied(j, i) {
                    Bound::INFINITY
                } else {
                    z.get(j, i)
                };
                if let Some(part) = render_range(&term, lower, upper, false) {
                    parts.push(part);
                }
            }
        }
        if parts.is_empty() {
            "true".to_string()
        } else {
            parts.join(" && ")
        }
    }
}

// `lower` is the matrix entry bounding the negated term.
fn render_range(term: &str, lower: Bound, upper: Bound, nonneg: bool) -> Option<String> {
    let lo = lower.value().map(|v| (-v, lower.is_strict()));
    let lo = match lo {
        Some((0, false)) if nonneg && upper != Bound::LE_ZERO => None,
        other => other,
    };
    let hi = upper.value().map(|v| (v, upper.is_strict()));
    match (lo, hi) {
        (None, None) => None,
        (Some((l, false)), Some((h, false))) if l == h => Some(format!("{term} == {l}")),
        (Some((l, ls)), Some((h, hs))) => Some(format!(
            "{l} {} {term} {} {h}",
            if ls { "<" } else { "<=" },
            if hs { "<" } else { "<=" }
        )),
        (Some((l, ls)), None) => Some(format!("{term} {} {l}", if ls { ">" } else { ">=" })),
        (None, Some((h, hs))) => Some(format!("{term} {} {h}", if hs { "<" } else { "<=" })),
    }
}

impl fmt::Display for Zone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..self.dim).map(|i| format!("x{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        f.write_str(&self.render(&refs))
    }
}

impl fmt::Debug for Zone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Zone[{}]", self)
    }
}

impl PartialOrd for Zone {
    /// Set inclusion; `None` for incomparable zones.
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (other.includes(self), self.includes(other)) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            (false, false) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn le(v: i64) -> Bound {
        Bound::le(v)
    }

    #[test]
    fn bound_order() {
        assert!(Bound::le(3) > Bound::lt(3));
        assert!(Bound::lt(3) > Bound::le(2));
        assert!(Bound::INFINITY > Bound::le(1 << 40));
        assert_eq!(Bound::le(2) + Bound::lt(3), Bound::lt(5));
        assert_eq!(Bound::le(2) + Bound::le(-3), Bound::le(-1));
        assert_eq!(Bound::le(2) + Bound::INFINITY, Bound::INFINITY);
        assert_eq!(Bound::le(4).complement(), Bound::lt(-4));
        assert_eq!(Bound::lt(4).complement(), Bound::le(-4));
    }

    #[test]
    fn closure_derives_implied_bound() {
        // x <= 3, y - x <= 2  =>  y <= 5
        let z = Zone::from_constraints(3, [(1, 0, le(3)), (2, 1, le(2))]);
        assert_eq!(z.get(2, 0), le(5));
        assert_eq!(z.canonicalize(), z);
    }

    #[test]
    fn contradiction_is_empty() {
        let z = Zone::from_constraints(2, [(1, 0, le(1)), (0, 1, le(-2))]);
        assert!(z.is_empty());
        assert_eq!(z, Zone::empty(2));
    }

    #[test]
    fn up_from_origin() {
        let z = Zone::zero(3).up().unwrap();
        assert!(z.upper(1).is_infinite());
        assert_eq!(z.get(1, 2), le(0));
        assert_eq!(z.get(2, 1), le(0));
        assert_eq!(z.up().unwrap(), z);
    }

    #[test]
    fn up_keeps_differences() {
        // x in [1, 2], y - x == 3
        let z = Zone::from_constraints(3, [(1, 0, le(2)), (0, 1, le(-1)), (2, 1, le(3)), (1, 2, le(-3))]);
        let u = z.up().unwrap();
        assert_eq!(u.lower(1), (1, false));
        assert!(u.upper(1).is_infinite());
        assert_eq!(u.get(2, 1), le(3));
        assert_eq!(u.get(1, 2), le(-3));
        assert!(matches!(Zone::empty(2).up(), Err(ZoneError::Empty)));
    }

    #[test]
    fn constrain_examples() {
        let z = Zone::universe(2).constrain_raw(1, 0, le(5));
        assert_eq!(z.upper(1), le(5));
        assert_eq!(z.lower(1), (0, false));
        let z = Zone::from_constraints(2, [(1, 0, le(3))]).constrain_raw(0, 1, le(-4));
        assert!(z.is_empty());
    }

    #[test]
    fn reset_keeps_other_clocks() {
        // x, y in [1, 2], x == y; reset x
        let z = Zone::from_constraints(
            3,
            [
                (1, 0, le(2)),
                (0, 1, le(-1)),
                (2, 0, le(2)),
                (0, 2, le(-1)),
                (1, 2, le(0)),
                (2, 1, le(0)),
            ],
        );
        let r = z.reset(&[1]).unwrap();
        assert_eq!(r.upper(1), le(0));
        assert_eq!(r.lower(1), (0, false));
        assert_eq!(r.upper(2), le(2));
        assert_eq!(r.lower(2), (1, false));
        assert_eq!(r.reset(&[1]).unwrap(), r);
        assert_eq!(z.reset(&[]).unwrap(), z);
    }

    #[test]
    fn includes_examples() {
        let a = Zone::from_constraints(2, [(1, 0, le(5))]);
        let b = Zone::from_constraints(2, [(1, 0, le(3))]);
        assert!(a.includes(&a));
        assert!(a.includes(&b));
        assert!(!b.includes(&a));
        assert!(a.includes(&Zone::empty(2)));
        assert!(!Zone::empty(2).includes(&a));
    }

    #[test]
    fn extrapolation() {
        let z = Zone::from_constraints(2, [(1, 0, le(3))]);
        assert_eq!(z.extrapolate(&[0, 10]), z);
        let z = Zone::from_constraints(2, [(0, 1, le(-15))]);
        let e = z.extrapolate(&[0, 10]);
        assert_eq!(e.get(0, 1), Bound::lt(-10));
        assert!(e.upper(1).is_infinite());
    }

    #[test]
    fn free_clock() {
        let z = Zone::zero(3).up().unwrap().constrain_raw(1, 0, le(4));
        let f = z.free(2).unwrap();
        assert_eq!(f.upper(1), le(4));
        assert!(f.upper(2).is_infinite());
        assert_eq!(f.get(0, 2), Bound::LE_ZERO);
    }

    #[test]
    fn rendering() {
        let z = Zone::from_constraints(3, [(1, 0, le(5)), (0, 1, le(-2))]);
        assert_eq!(z.render(&["x", "y"]), "2 <= x <= 5");
        assert_eq!(Zone::zero(2).render(&["x"]), "x == 0");
        assert_eq!(Zone::universe(2).render(&["x"]), "true");
        assert_eq!(Zone::empty(2).render(&["x"]), "false");
    }
}
