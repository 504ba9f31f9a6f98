//! Dempster-Shafer belief structures on a finite frame `Ω = {0, …, n−1}`.
//!
//! Subsets are `u32` bitmasks (bit `i` set ⇔ element `i` present), which
//! caps the frame at 24 elements so that exhaustive checks stay tractable.
//! Mass functions are stored sparsely as their focal elements.
//!
//! * belief `ℓ(A) = Σ_{F ⊆ A} m(F)` (lower probability)
//! * plausibility `u(A) = Σ_{F ∩ A ≠ ∅} m(F) = 1 − ℓ(Ā)` (upper probability)
//! * `δ(A,B) = q(A∪B) − q(A) − q(B) + q(A∩B)` for any set function `q`

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance;

pub type Subset = u32;

pub const MAX_FRAME_SIZE: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frame {
    size: usize,
}

impl Frame {
    pub fn new(size: usize) -> Result<Self> {
        if (1..=MAX_FRAME_SIZE).contains(&size) {
            Ok(Self { size })
        } else {
            Err(Error::FrameSize {
                max: MAX_FRAME_SIZE,
                got: size,
            })
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// `Ω` as a bitmask.
    pub fn full(&self) -> Subset {
        ((1u64 << self.size) - 1) as Subset
    }

    pub fn complement(&self, a: Subset) -> Subset {
        !a & self.full()
    }

    pub fn contains(&self, a: Subset) -> bool {
        a & !self.full() == 0
    }

    pub fn check(&self, a: Subset) -> Result<()> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(Error::SubsetOutOfFrame {
                subset: a,
                size: self.size,
            })
        }
    }

    /// All `2^n` subsets.
    pub fn subsets(&self) -> impl Iterator<Item = Subset> {
        0..=self.full()
    }
}

/// A set function on the subsets of a frame.
pub trait SetFunction {
    fn frame(&self) -> Frame;

    /// Value on a subset already known to lie in the frame.
    fn value(&self, a: Subset) -> f64;

    fn eval(&self, a: Subset) -> Result<f64> {
        self.frame().check(a)?;
        Ok(self.value(a))
    }
}

/// `q(A∪B) − q(A) − q(B) + q(A∩B)`: zero for additive `q`, non-negative for
/// beliefs, non-positive for plausibilities.
pub fn delta<F: SetFunction + ?Sized>(q: &F, a: Subset, b: Subset) -> Result<f64> {
    let frame = q.frame();
    frame.check(a)?;
    frame.check(b)?;
    Ok(q.value(a | b) - q.value(a) - q.value(b) + q.value(a & b))
}

/// Basic probability assignment over focal elements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MassJson", into = "MassJson")]
pub struct MassFunction {
    frame: Frame,
    focal: Vec<(Subset, f64)>,
}

impl MassFunction {
    /// Repeated subsets are merged; zero weights are dropped. The weights
    /// must lie in `[0,1]`, sum to one within `zero_tol`, and put no mass on
    /// the empty set.
    pub fn new(frame: Frame, masses: impl IntoIterator<Item = (Subset, f64)>) -> Result<Self> {
        let tol = tolerance::session().zero_tol;
        let mut merged: BTreeMap<Subset, f64> = BTreeMap::new();
        for (subset, w) in masses {
            frame.check(subset)?;
            if !w.is_finite() || !(0.0..=1.0).contains(&w) {
                return Err(Error::InvalidMass(format!("weight {w} outside [0,1]")));
            }
            *merged.entry(subset).or_insert(0.0) += w;
        }
        if merged.get(&0).is_some_and(|&w| w > tol) {
            return Err(Error::InvalidMass("empty set carries mass".into()));
        }
        merged.remove(&0);
        let total: f64 = merged.values().sum();
        if (total - 1.0).abs() > tol {
            return Err(Error::InvalidMass(format!("weights sum to {total}")));
        }
        let focal = merged.into_iter().filter(|&(_, w)| w > 0.0).collect();
        Ok(Self { frame, focal })
    }

    /// Probability vector on singletons, i.e. an additive measure.
    pub fn bayesian(probabilities: &[f64]) -> Result<Self> {
        let frame = Frame::new(probabilities.len())?;
        Self::new(
            frame,
            probabilities.iter().enumerate().map(|(i, &p)| (1 << i, p)),
        )
    }

    /// Random mass function with up to `max_focal` focal elements and
    /// exponential weights normalized to one.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, frame: Frame, max_focal: usize) -> Self {
        let count = rng.random_range(1..=max_focal.max(1));
        let raw: Vec<(Subset, f64)> = (0..count)
            .map(|_| {
                let subset = rng.random_range(1..=frame.full());
                let w = -(1.0 - rng.random::<f64>()).ln();
                (subset, w)
            })
            .collect();
        let total: f64 = raw.iter().map(|(_, w)| w).sum();
        Self::new(frame, raw.into_iter().map(|(s, w)| (s, w / total)))
            .expect("normalized random weights")
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn focal_elements(&self) -> &[(Subset, f64)] {
        &self.focal
    }

    pub fn mass(&self, a: Subset) -> f64 {
        self.focal
            .iter()
            .find(|&&(s, _)| s == a)
            .map_or(0.0, |&(_, w)| w)
    }

    /// Every focal element is a singleton.
    pub fn is_bayesian(&self) -> bool {
        self.focal.iter().all(|&(s, _)| s.count_ones() == 1)
    }

    /// `ℓ(A)`.
    pub fn belief(&self, a: Subset) -> Result<f64> {
        self.frame.check(a)?;
        Ok(self.belief_unchecked(a))
    }

    /// `u(A)`.
    pub fn plausibility(&self, a: Subset) -> Result<f64> {
        self.frame.check(a)?;
        Ok(self.plausibility_unchecked(a))
    }

    fn belief_unchecked(&self, a: Subset) -> f64 {
        self.focal
            .iter()
            .filter(|&&(s, _)| s & !a == 0)
            .map(|&(_, w)| w)
            .sum()
    }

    fn plausibility_unchecked(&self, a: Subset) -> f64 {
        self.focal
            .iter()
            .filter(|&&(s, _)| s & a != 0)
            .map(|&(_, w)| w)
            .sum()
    }

    pub fn lower(&self) -> Belief<'_> {
        Belief(self)
    }

    pub fn upper(&self) -> Plausibility<'_> {
        Plausibility(self)
    }

    /// Dempster's rule of combination, normalized by the non-conflicting mass.
    pub fn combine(&self, other: &Self) -> Result<Self> {
        if self.frame != other.frame {
            return Err(Error::DimensionMismatch(self.frame.size, other.frame.size));
        }
        let mut joint: BTreeMap<Subset, f64> = BTreeMap::new();
        let mut conflict = 0.0;
        for &(a, wa) in &self.focal {
            for &(b, wb) in &other.focal {
                let c = a & b;
                if c == 0 {
                    conflict += wa * wb;
                } else {
                    *joint.entry(c).or_insert(0.0) += wa * wb;
                }
            }
        }
        let norm = 1.0 - conflict;
        if norm <= tolerance::session().zero_tol {
            return Err(Error::TotalConflict);
        }
        let total: f64 = joint.values().sum();
        Self::new(self.frame, joint.into_iter().map(|(s, w)| (s, w / total)))
    }
}

/// The employee example: `n₁` known under 30, `n₂` known over 50, `n₃`
/// somewhere in 25–45.
#[derive(Debug, Clone)]
pub struct EmployeeExample {
    pub mass: MassFunction,
    /// "under 35".
    pub under_35: Subset,
}

/// Age bands of the employee frame.
pub const AGE_BANDS: [&str; 4] = ["<30", "30-35", "35-50", ">=50"];

impl EmployeeExample {
    pub fn new(n1: u64, n2: u64, n3: u64) -> Result<Self> {
        let n = n1 + n2 + n3;
        if n == 0 {
            return Err(Error::InvalidMass("no employees".into()));
        }
        let frame = Frame::new(AGE_BANDS.len())?;
        let total = n as f64;
        let mass = MassFunction::new(
            frame,
            [
                (0b0001, n1 as f64 / total),
                (0b1000, n2 as f64 / total),
                // 25–45 straddles the first three bands
                (0b0111, n3 as f64 / total),
            ],
        )?;
        Ok(Self {
            mass,
            under_35: 0b0011,
        })
    }
}

pub struct Belief<'a>(&'a MassFunction);
pub struct Plausibility<'a>(&'a MassFunction);

impl SetFunction for Belief<'_> {
    fn frame(&self) -> Frame {
        self.0.frame
    }
    fn value(&self, a: Subset) -> f64 {
        self.0.belief_unchecked(a)
    }
}

impl SetFunction for Plausibility<'_> {
    fn frame(&self) -> Frame {
        self.0.frame
    }
    fn value(&self, a: Subset) -> f64 {
        self.0.plausibility_unchecked(a)
    }
}

/// Additive (Kolmogorov) measure `q(A) = Σ_{i ∈ A} pᵢ`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdditiveMeasure {
    frame: Frame,
    probabilities: Vec<f64>,
}

impl AdditiveMeasure {
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        let frame = Frame::new(probabilities.len())?;
        if probabilities.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidMass(
                "negative or non-finite probability".into(),
            ));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > tolerance::session().zero_tol {
            return Err(Error::InvalidMass(format!("probabilities sum to {total}")));
        }
        Ok(Self {
            frame,
            probabilities,
        })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }
}

impl SetFunction for AdditiveMeasure {
    fn frame(&self) -> Frame {
        self.frame
    }
    fn value(&self, a: Subset) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .filter(|&(i, _)| a >> i & 1 == 1)
            .map(|(_, p)| p)
            .sum()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MassEntry {
    pub subset: Subset,
    pub weight: f64,
}

/// `{"frame_size":n,"masses":[{"subset":bitmask,"weight":w},...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MassJson {
    pub frame_size: usize,
    pub masses: Vec<MassEntry>,
}

impl From<MassFunction> for MassJson {
    fn from(m: MassFunction) -> Self {
        Self {
            frame_size: m.frame.size,
            masses: m
                .focal
                .iter()
                .map(|&(subset, weight)| MassEntry { subset, weight })
                .collect(),
        }
    }
}

impl TryFrom<MassJson> for MassFunction {
    type Error = Error;
    fn try_from(j: MassJson) -> Result<Self> {
        MassFunction::new(
            Frame::new(j.frame_size)?,
            j.masses.into_iter().map(|e| (e.subset, e.weight)),
        )
    }
}

// ----------------------------------------------------------------------------
// Property table for lower and upper probabilities

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Table1Row {
    /// `A ⊆ B ⇒ ℓ(A) ≤ ℓ(B)`
    LowerMonotone,
    /// `A ⊆ B ⇒ u(A) ≤ u(B)`
    UpperMonotone,
    /// `ℓ(∅) = 0, ℓ(Ω) = 1`
    LowerNormalized,
    /// `u(∅) = 0, u(Ω) = 1`
    UpperNormalized,
    /// `δ_ℓ(A,B) ≥ 0`
    LowerSuperadditive,
    /// `δ_u(A,B) ≤ 0`
    UpperSubadditive,
    /// `ℓ(Ā) + ℓ(A) ≤ 1`
    LowerComplement,
    /// `u(Ā) + u(A) ≥ 1`
    UpperComplement,
    /// `u(A) + u(B) − u(A∪B) ≥ 0`
    UpperBoole,
    /// `u(A) = 1 − ℓ(Ā)`
    Conjugate,
    /// `0 ≤ ℓ(A) ≤ u(A) ≤ 1`
    Bracket,
}

impl Table1Row {
    pub const ALL: [Table1Row; 11] = [
        Table1Row::LowerMonotone,
        Table1Row::UpperMonotone,
        Table1Row::LowerNormalized,
        Table1Row::UpperNormalized,
        Table1Row::LowerSuperadditive,
        Table1Row::UpperSubadditive,
        Table1Row::LowerComplement,
        Table1Row::UpperComplement,
        Table1Row::UpperBoole,
        Table1Row::Conjugate,
        Table1Row::Bracket,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub a: Subset,
    pub b: Subset,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RowResult {
    pub row: Table1Row,
    pub passed: bool,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Table1Report {
    pub pairs_checked: usize,
    pub rows: Vec<RowResult>,
    /// A pair with `ℓ(A) + ℓ(B) − ℓ(A∪B) < 0`, if one was seen. Not a
    /// failure: lower probabilities may violate Boole's inequality.
    pub lower_boole_violation: Option<Witness>,
    /// `ℓ = u` on every subset visited (the Kolmogorov case).
    pub lower_equals_upper: bool,
}

impl Table1Report {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }

    pub fn row(&self, row: Table1Row) -> &RowResult {
        self.rows
            .iter()
            .find(|r| r.row == row)
            .expect("every row is reported")
    }
}

struct Table1Checker<'a> {
    m: &'a MassFunction,
    tol: f64,
    witnesses: BTreeMap<u8, Witness>,
    lower_boole: Option<Witness>,
    lower_equals_upper: bool,
    pairs: usize,
}

impl<'a> Table1Checker<'a> {
    fn new(m: &'a MassFunction) -> Self {
        Self {
            m,
            tol: tolerance::session().zero_tol,
            witnesses: BTreeMap::new(),
            lower_boole: None,
            lower_equals_upper: true,
            pairs: 0,
        }
    }

    fn fail(&mut self, row: Table1Row, a: Subset, b: Subset, value: f64) {
        self.witnesses
            .entry(row as u8)
            .or_insert(Witness { a, b, value });
    }

    fn normalization(&mut self) {
        let full = self.m.frame.full();
        let (l0, l1) = (self.m.belief_unchecked(0), self.m.belief_unchecked(full));
        if l0.abs() > self.tol || (l1 - 1.0).abs() > self.tol {
            self.fail(
                Table1Row::LowerNormalized,
                0,
                full,
                l0.abs().max((l1 - 1.0).abs()),
            );
        }
        let (u0, u1) = (
            self.m.plausibility_unchecked(0),
            self.m.plausibility_unchecked(full),
        );
        if u0.abs() > self.tol || (u1 - 1.0).abs() > self.tol {
            self.fail(
                Table1Row::UpperNormalized,
                0,
                full,
                u0.abs().max((u1 - 1.0).abs()),
            );
        }
    }

    fn pair(&mut self, a: Subset, b: Subset) {
        let frame = self.m.frame;
        let tol = self.tol;
        let l = |s| self.m.belief_unchecked(s);
        let u = |s| self.m.plausibility_unchecked(s);
        self.pairs += 1;

        let (la, lb, lu, li) = (l(a), l(b), l(a | b), l(a & b));
        let (ua, ub, uu, ui) = (u(a), u(b), u(a | b), u(a & b));
        let (lac, uac) = (l(frame.complement(a)), u(frame.complement(a)));

        // A∩B ⊆ B covers every inclusion pair when run over all pairs
        if li > lb + tol {
            self.fail(Table1Row::LowerMonotone, a & b, b, li - lb);
        }
        if ui > ub + tol {
            self.fail(Table1Row::UpperMonotone, a & b, b, ui - ub);
        }
        let dl = lu - la - lb + li;
        if dl < -tol {
            self.fail(Table1Row::LowerSuperadditive, a, b, dl);
        }
        let du = uu - ua - ub + ui;
        if du > tol {
            self.fail(Table1Row::UpperSubadditive, a, b, du);
        }
        if lac + la > 1.0 + tol {
            self.fail(Table1Row::LowerComplement, a, a, lac + la);
        }
        if uac + ua < 1.0 - tol {
            self.fail(Table1Row::UpperComplement, a, a, uac + ua);
        }
        let boole_u = ua + ub - uu;
        if boole_u < -tol {
            self.fail(Table1Row::UpperBoole, a, b, boole_u);
        }
        if (ua - (1.0 - lac)).abs() > tol {
            self.fail(Table1Row::Conjugate, a, a, ua - (1.0 - lac));
        }
        if la < -tol || la > ua + tol || ua > 1.0 + tol {
            self.fail(Table1Row::Bracket, a, a, la - ua);
        }
        let boole_l = la + lb - lu;
        if boole_l < -tol && self.lower_boole.is_none() {
            self.lower_boole = Some(Witness {
                a,
                b,
                value: boole_l,
            });
        }
        if (la - ua).abs() > tol || (lb - ub).abs() > tol {
            self.lower_equals_upper = false;
        }
    }

    fn finish(self) -> Table1Report {
        let rows = Table1Row::ALL
            .iter()
            .map(|&row| {
                let witness = self.witnesses.get(&(row as u8)).copied();
                RowResult {
                    row,
                    passed: witness.is_none(),
                    witness,
                }
            })
            .collect();
        Table1Report {
            pairs_checked: self.pairs,
            rows,
            lower_boole_violation: self.lower_boole,
            lower_equals_upper: self.lower_equals_upper,
        }
    }
}

/// Checks every row of the property table on `trials` random subset pairs.
pub fn check_table1<R: Rng + ?Sized>(m: &MassFunction, trials: usize, rng: &mut R) -> Table1Report {
    let mut checker = Table1Checker::new(m);
    checker.normalization();
    let full = m.frame.full();
    for _ in 0..trials {
        let a = rng.random_range(0..=full);
        let b = rng.random_range(0..=full);
        checker.pair(a, b);
    }
    checker.finish()
}

/// Checks every row on all `4^n` subset pairs.
pub fn check_table1_exhaustive(m: &MassFunction) -> Table1Report {
    let mut checker = Table1Checker::new(m);
    checker.normalization();
    for a in m.frame.subsets() {
        for b in m.frame.subsets() {
            checker.pair(a, b);
        }
    }
    checker.finish()
}
