//! Potential representations.
//!
//! Two kinds are supported: Walters-class potentials on the binary full
//! shift, which are constant on run cylinders and vanish at the two fixed
//! points, with exact geometric-tail coefficient sequences; and locally
//! constant potentials given by a value table at a fixed depth (used as
//! the input to the transfer and tropical machinery).

use crate::shift_space::{enumerate_words, EPPoint, ShiftSpace, Word};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PotentialError {
    #[error("tail ratio must lie strictly inside (0,1), got {0}")]
    InvalidTailRatio(f64),
    #[error("run-value sequences are indexed from 2, got start index {0}")]
    InvalidStartIndex(u32),
    #[error("sequence value at index {index} must be finite, got {value}")]
    NonFiniteValue { index: u32, value: f64 },
    #[error("Walters potentials require strictly negative coefficients ({what})")]
    NotStrictlyNegative { what: &'static str },
    #[error("Walters potentials live on the binary full shift")]
    NotBinaryFullShift,
    #[error("point classification requires binary symbols")]
    NonBinaryPoint,
    #[error("projection depth must be at least 2, got {0}")]
    ProjectionTooShallow(usize),
    #[error("value table has {got} entries, expected {expected} for depth {depth}")]
    TableSizeMismatch {
        got: usize,
        expected: usize,
        depth: usize,
    },
    #[error("tail sum index must be at least {min}, got {got}")]
    TailIndexTooSmall { min: u32, got: u32 },
}

/// A real sequence `value_n` defined for `n >= start_index`: finitely many
/// explicit prefix values followed by an exact geometric tail
/// `value_n = tail_coeff * tail_ratio^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeometricTailSequence {
    start_index: u32,
    prefix: Vec<f64>,
    tail_coeff: f64,
    tail_ratio: f64,
}

impl GeometricTailSequence {
    pub fn new(
        start_index: u32,
        prefix: Vec<f64>,
        tail_coeff: f64,
        tail_ratio: f64,
    ) -> Result<Self, PotentialError> {
        if start_index != 2 {
            return Err(PotentialError::InvalidStartIndex(start_index));
        }
        if !(tail_ratio > 0.0 && tail_ratio < 1.0) {
            return Err(PotentialError::InvalidTailRatio(tail_ratio));
        }
        for (i, &v) in prefix.iter().enumerate() {
            if !v.is_finite() {
                return Err(PotentialError::NonFiniteValue {
                    index: start_index + i as u32,
                    value: v,
                });
            }
        }
        if !tail_coeff.is_finite() {
            return Err(PotentialError::NonFiniteValue {
                index: start_index + prefix.len() as u32,
                value: tail_coeff,
            });
        }
        Ok(GeometricTailSequence {
            start_index,
            prefix,
            tail_coeff,
            tail_ratio,
        })
    }

    /// Pure geometric sequence `K * r^n` from index 2 on.
    pub fn pure(tail_coeff: f64, tail_ratio: f64) -> Result<Self, PotentialError> {
        Self::new(2, Vec::new(), tail_coeff, tail_ratio)
    }

    pub fn start_index(&self) -> u32 {
        self.start_index
    }

    /// First index at which the closed-form tail applies.
    pub fn tail_start(&self) -> u32 {
        self.start_index + self.prefix.len() as u32
    }

    /// `value_n` for `n >= start_index`.
    pub fn value(&self, n: u32) -> f64 {
        assert!(n >= self.start_index, "sequence index below start");
        let off = (n - self.start_index) as usize;
        if off < self.prefix.len() {
            self.prefix[off]
        } else {
            self.tail_coeff * self.tail_ratio.powi(n as i32)
        }
    }

    /// Exact `sum_{j>=1} value_{q+j}`: finite prefix part plus the
    /// geometric closed form, no truncation.
    pub fn tail_sum(&self, q: u32) -> f64 {
        assert!(
            q + 1 >= self.start_index,
            "tail sum must start at or after the sequence start"
        );
        let ts = self.tail_start();
        let mut sum = 0.0;
        let mut n = q + 1;
        while n < ts {
            sum += self.value(n);
            n += 1;
        }
        // sum_{m >= max(q+1, tail_start)} K r^m = K r^m0 / (1 - r)
        let m0 = n as i32;
        sum + self.tail_coeff * self.tail_ratio.powi(m0) / (1.0 - self.tail_ratio)
    }

    /// Supremum of `|value_n|` over `n >= k`.
    pub fn sup_abs_from(&self, k: u32) -> f64 {
        let ts = self.tail_start();
        let mut sup: f64 = 0.0;
        let mut n = k.max(self.start_index);
        while n < ts {
            sup = sup.max(self.value(n).abs());
            n += 1;
        }
        sup.max(self.tail_coeff.abs() * self.tail_ratio.powi(n as i32))
    }

    pub fn tail_ratio(&self) -> f64 {
        self.tail_ratio
    }

    fn all_strictly_negative(&self) -> bool {
        self.prefix.iter().all(|&v| v < 0.0) && self.tail_coeff < 0.0
    }

    fn scaled(&self, factor: f64) -> Self {
        GeometricTailSequence {
            start_index: self.start_index,
            prefix: self.prefix.iter().map(|v| v * factor).collect(),
            tail_coeff: self.tail_coeff * factor,
            tail_ratio: self.tail_ratio,
        }
    }
}

/// The run-cylinder class of a binary point: one of the two fixed points,
/// or determined by the length of the initial constant run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PointClass {
    ZeroFix,
    OneFix,
    ZeroRun(u32),
    OneRun(u32),
}

/// Classify a binary point by its initial run.
pub fn classify(p: &EPPoint) -> Result<PointClass, PotentialError> {
    let first = p.symbol_at(0);
    if first > 1 {
        return Err(PotentialError::NonBinaryPoint);
    }
    if p.is_fixed() {
        return Ok(match first {
            0 => PointClass::ZeroFix,
            _ => PointClass::OneFix,
        });
    }
    let bound = p.preperiod().len() + 2 * p.period().len();
    let mut run = 1u32;
    for i in 1..bound {
        let s = p.symbol_at(i);
        if s > 1 {
            return Err(PotentialError::NonBinaryPoint);
        }
        if s == first {
            run += 1;
        } else {
            // Scan the rest for range validation only.
            for j in i + 1..bound {
                if p.symbol_at(j) > 1 {
                    return Err(PotentialError::NonBinaryPoint);
                }
            }
            return Ok(match first {
                0 => PointClass::ZeroRun(run),
                _ => PointClass::OneRun(run),
            });
        }
    }
    // A canonical eventually periodic point with no break in
    // preperiod + two periods is a fixed point, handled above.
    unreachable!("non-fixed point must contain a symbol break");
}

/// Walters-class potential on the binary full shift: constant on the run
/// cylinders, zero at both fixed points, strictly negative elsewhere.
#[derive(Clone, Debug, PartialEq)]
pub struct WaltersPotential {
    coeff_b: f64,
    coeff_d: f64,
    a_seq: GeometricTailSequence,
    c_seq: GeometricTailSequence,
    space: ShiftSpace,
}

impl WaltersPotential {
    pub fn new(
        coeff_b: f64,
        coeff_d: f64,
        a_seq: GeometricTailSequence,
        c_seq: GeometricTailSequence,
        theta: f64,
    ) -> Result<Self, PotentialError> {
        if !(coeff_b < 0.0) {
            return Err(PotentialError::NotStrictlyNegative { what: "b" });
        }
        if !(coeff_d < 0.0) {
            return Err(PotentialError::NotStrictlyNegative { what: "d" });
        }
        if !a_seq.all_strictly_negative() {
            return Err(PotentialError::NotStrictlyNegative { what: "a_n" });
        }
        if !c_seq.all_strictly_negative() {
            return Err(PotentialError::NotStrictlyNegative { what: "c_n" });
        }
        let space = ShiftSpace::full(2, theta).map_err(|_| PotentialError::NotBinaryFullShift)?;
        Ok(WaltersPotential {
            coeff_b,
            coeff_d,
            a_seq,
            c_seq,
            space,
        })
    }

    /// Construction without the negativity checks, for degenerate
    /// instances in tests (for example the zero potential).
    #[cfg(test)]
    pub(crate) fn new_degenerate(
        coeff_b: f64,
        coeff_d: f64,
        a_seq: GeometricTailSequence,
        c_seq: GeometricTailSequence,
        theta: f64,
    ) -> Self {
        WaltersPotential {
            coeff_b,
            coeff_d,
            a_seq,
            c_seq,
            space: ShiftSpace::full(2, theta).unwrap(),
        }
    }

    pub fn coeff_b(&self) -> f64 {
        self.coeff_b
    }

    pub fn coeff_d(&self) -> f64 {
        self.coeff_d
    }

    pub fn a_seq(&self) -> &GeometricTailSequence {
        &self.a_seq
    }

    pub fn c_seq(&self) -> &GeometricTailSequence {
        &self.c_seq
    }

    pub fn space(&self) -> &ShiftSpace {
        &self.space
    }

    /// Value on a run-cylinder class.
    pub fn class_value(&self, class: PointClass) -> f64 {
        match class {
            PointClass::ZeroFix | PointClass::OneFix => 0.0,
            PointClass::ZeroRun(1) => self.coeff_b,
            PointClass::OneRun(1) => self.coeff_d,
            PointClass::ZeroRun(n) => self.a_seq.value(n),
            PointClass::OneRun(n) => self.c_seq.value(n),
        }
    }

    /// Evaluate at an eventually periodic point.
    pub fn value_at(&self, p: &EPPoint) -> Result<f64, PotentialError> {
        Ok(self.class_value(classify(p)?))
    }

    /// Class of the run-extension representative of a finite word: the
    /// point `w . (last symbol of w)^infinity`.
    pub fn word_class(word: &[u8]) -> Result<PointClass, PotentialError> {
        let first = word[0];
        if word.iter().any(|&s| s > 1) {
            return Err(PotentialError::NonBinaryPoint);
        }
        let run = word.iter().take_while(|&&s| s == first).count() as u32;
        if run as usize == word.len() {
            // Constant word: representative is the fixed point.
            return Ok(match first {
                0 => PointClass::ZeroFix,
                _ => PointClass::OneFix,
            });
        }
        Ok(match first {
            0 => PointClass::ZeroRun(run),
            _ => PointClass::OneRun(run),
        })
    }

    /// Depth-`k` locally constant approximation. The value on a word `w`
    /// is the exact value at the run-extension representative
    /// `w . (last symbol)^infinity`; the declared variation bound is the
    /// supremum of `|f|` over the two constant-word cylinders, which is
    /// where the representative can disagree with other points of the
    /// cylinder.
    pub fn project(&self, k: usize) -> Result<LocallyConstantPotential, PotentialError> {
        if k < 2 {
            return Err(PotentialError::ProjectionTooShallow(k));
        }
        let words = enumerate_words(&self.space, k);
        let values = words
            .iter()
            .map(|w| Ok(self.class_value(Self::word_class(w.symbols())?)))
            .collect::<Result<Vec<f64>, PotentialError>>()?;
        let variation = self
            .a_seq
            .sup_abs_from(k as u32)
            .max(self.c_seq.sup_abs_from(k as u32));
        Ok(LocallyConstantPotential {
            depth: k,
            words,
            values,
            variation,
        })
    }

    /// Upper bound for the Lipschitz constant with respect to the theta
    /// metric. Two points with first disagreement at position `s` share a
    /// constant prefix (otherwise both lie in the same run cylinder and
    /// the values agree), so it suffices to bound run-value gaps against
    /// `theta^s`; finite whenever the tail ratio does not exceed theta.
    pub fn lipschitz_bound(&self) -> f64 {
        let theta = self.space.theta();
        let max_abs = self
            .coeff_b
            .abs()
            .max(self.coeff_d.abs())
            .max(self.a_seq.sup_abs_from(2))
            .max(self.c_seq.sup_abs_from(2));
        let mut bound = max_abs / theta;
        for (seq, run1) in [(&self.a_seq, self.coeff_b), (&self.c_seq, self.coeff_d)] {
            if seq.tail_ratio() > theta {
                return f64::INFINITY;
            }
            let horizon = seq.tail_start() + 2;
            for s in 2..=horizon {
                let prev = if s - 1 == 1 { run1 } else { seq.value(s - 1) };
                let term = (prev.abs() + seq.sup_abs_from(s)) / theta.powi(s as i32);
                bound = bound.max(term);
            }
            // Beyond the prefix the per-index term is
            // |K| (1 + r) / r * (r/theta)^s, non-increasing for r <= theta,
            // so the horizon above already covers the supremum.
        }
        bound
    }

    /// Scale every coefficient by a positive factor.
    pub fn scaled(&self, factor: f64) -> WaltersPotential {
        WaltersPotential {
            coeff_b: self.coeff_b * factor,
            coeff_d: self.coeff_d * factor,
            a_seq: self.a_seq.scaled(factor),
            c_seq: self.c_seq.scaled(factor),
            space: self.space.clone(),
        }
    }
}

/// A potential constant on depth-`k` cylinders, as a value table aligned
/// with the lexicographic word enumeration.
#[derive(Clone, Debug, PartialEq)]
pub struct LocallyConstantPotential {
    depth: usize,
    words: Vec<Word>,
    values: Vec<f64>,
    variation: f64,
}

impl LocallyConstantPotential {
    pub fn new(space: &ShiftSpace, depth: usize, values: Vec<f64>) -> Result<Self, PotentialError> {
        let words = enumerate_words(space, depth);
        if words.len() != values.len() {
            return Err(PotentialError::TableSizeMismatch {
                got: values.len(),
                expected: words.len(),
                depth,
            });
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(PotentialError::NonFiniteValue {
                    index: i as u32,
                    value: v,
                });
            }
        }
        Ok(LocallyConstantPotential {
            depth,
            words,
            values,
            variation: 0.0,
        })
    }

    /// The zero potential at the given depth.
    pub fn zero(space: &ShiftSpace, depth: usize) -> Self {
        let words = enumerate_words(space, depth);
        let n = words.len();
        LocallyConstantPotential {
            depth,
            words,
            values: vec![0.0; n],
            variation: 0.0,
        }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Declared sup-norm bound on the variation of the underlying
    /// potential within depth-`k` cylinders (0 for exact tables).
    pub fn variation(&self) -> f64 {
        self.variation
    }

    /// Value on the cylinder of the first `depth` symbols of `syms`.
    pub fn value_on_prefix(&self, syms: &[u8]) -> f64 {
        assert!(syms.len() >= self.depth, "prefix shorter than table depth");
        let idx = self
            .words
            .binary_search_by(|w| w.symbols().cmp(&syms[..self.depth]))
            .expect("inadmissible prefix for this table");
        self.values[idx]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::shift_space::EPPoint;

    fn pt(pre: &[u8], per: &[u8]) -> EPPoint {
        EPPoint::new(pre.to_vec(), per.to_vec(), &ShiftSpace::full(2, 0.5).unwrap()).unwrap()
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&pt(&[], &[0])).unwrap(), PointClass::ZeroFix);
        assert_eq!(classify(&pt(&[0, 0], &[1])).unwrap(), PointClass::ZeroRun(2));
        assert_eq!(classify(&pt(&[1], &[0])).unwrap(), PointClass::OneRun(1));
        assert_eq!(classify(&pt(&[], &[0, 1])).unwrap(), PointClass::ZeroRun(1));
    }

    #[test]
    fn eval_walters_on_w1() {
        let f = fixtures::w1();
        assert_eq!(f.value_at(&pt(&[0], &[1])).unwrap(), -0.1);
        assert_eq!(f.value_at(&pt(&[], &[0])).unwrap(), 0.0);
        assert_eq!(f.value_at(&pt(&[0, 0, 0], &[1])).unwrap(), -0.25);
    }

    #[test]
    fn tail_sums_are_exact() {
        let f = fixtures::w1();
        assert_eq!(f.a_seq().tail_sum(1), -1.0);
        assert_eq!(f.c_seq().tail_sum(2), -0.25);
        let zero = GeometricTailSequence::pure(0.0, 0.5).unwrap();
        assert_eq!(zero.tail_sum(1), 0.0);
        assert_eq!(zero.tail_sum(7), 0.0);
    }

    #[test]
    fn tail_sum_difference_gives_single_value() {
        let f = fixtures::w1();
        for q in 1..20 {
            let lhs = f.a_seq().tail_sum(q) - f.a_seq().tail_sum(q + 1);
            assert!((lhs - f.a_seq().value(q + 1)).abs() < 1e-15);
        }
        // Also with a nontrivial prefix.
        let seq = GeometricTailSequence::new(2, vec![-0.3, -0.7], -1.5, 0.25).unwrap();
        for q in 1..12 {
            let lhs = seq.tail_sum(q) - seq.tail_sum(q + 1);
            assert!((lhs - seq.value(q + 1)).abs() < 1e-15);
        }
    }

    #[test]
    fn projection_values() {
        let f = fixtures::w1();
        let p2 = f.project(2).unwrap();
        assert_eq!(p2.value_on_prefix(&[0, 1]), -0.1);
        let p3 = f.project(3).unwrap();
        assert_eq!(p3.value_on_prefix(&[0, 0, 1]), -0.5);
        assert_eq!(p3.value_on_prefix(&[0, 0, 0]), 0.0);
        assert_eq!(p3.value_on_prefix(&[1, 1, 1]), 0.0);
        assert!(f.project(1).is_err());
    }

    #[test]
    fn projection_refines_within_variation_bound() {
        let f = fixtures::w1();
        for k in 2..10usize {
            let coarse = f.project(k).unwrap();
            let fine = f.project(k + 1).unwrap();
            for w in fine.words() {
                let dv = (coarse.value_on_prefix(&w.symbols()[..k]) - fine.value_on_prefix(w.symbols())).abs();
                assert!(
                    dv <= coarse.variation() + 1e-15,
                    "depth {k}: refinement gap {dv} exceeds bound {}",
                    coarse.variation()
                );
            }
        }
    }

    #[test]
    fn lipschitz_bound_examples() {
        let zero_seq = GeometricTailSequence::pure(0.0, 0.5).unwrap();
        let zero = WaltersPotential::new_degenerate(0.0, 0.0, zero_seq.clone(), zero_seq, 0.5);
        assert_eq!(zero.lipschitz_bound(), 0.0);

        let f = fixtures::w1();
        let b = f.lipschitz_bound();
        assert!(b.is_finite() && b > 0.0);
        assert!(b >= (f.a_seq().value(2) - f.a_seq().value(3)).abs() / 0.25);

        let doubled = f.scaled(2.0);
        assert!((doubled.lipschitz_bound() - 2.0 * b).abs() < 1e-12);
    }

    #[test]
    fn eval_constant_on_run_cylinders() {
        let f = fixtures::w1();
        // Two different points in the same class get the same value exactly.
        let p = pt(&[0, 0], &[1]);
        let q = pt(&[0, 0, 1, 0], &[1, 0]);
        assert_eq!(classify(&p).unwrap(), classify(&q).unwrap());
        assert_eq!(f.value_at(&p).unwrap(), f.value_at(&q).unwrap());
    }

    #[test]
    fn negativity_is_enforced() {
        let good = GeometricTailSequence::pure(-1.0, 0.5).unwrap();
        let bad = GeometricTailSequence::pure(1.0, 0.5).unwrap();
        assert!(WaltersPotential::new(-0.1, -0.1, good.clone(), bad, 0.5).is_err());
        assert!(WaltersPotential::new(0.0, -0.1, good.clone(), good.clone(), 0.5).is_err());
        assert!(WaltersPotential::new(-0.1, -0.1, good.clone(), good, 0.5).is_ok());
    }
}
