//! Dense tensors over [`Jet4`] entries in four dimensions.
//!
//! Slots are ordered contravariant first, then covariant. Each index runs
//! over `0..4` and entries are stored row-major, so a `(p, q)` tensor holds
//! `4^(p+q)` jets.

use thiserror::Error;

use crate::jet::{Jet4, NVARS};

/// Highest rank stored densely (a second derivative of a rank-4 tensor).
pub const MAX_RANK: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TensorError {
    #[error("slot {slot} is out of range for a rank-{rank} tensor")]
    SlotOutOfRange { slot: usize, rank: usize },
    #[error("slot {slot} is not {expected}")]
    SlotKind { slot: usize, expected: &'static str },
    #[error("slots {0:?} mix contravariant and covariant indices")]
    MixedVariance(Vec<usize>),
    #[error("expected a symmetric ({expected}) metric, got valence {got:?}")]
    WrongMetricValence { expected: &'static str, got: (usize, usize) },
    #[error("valence mismatch: {left:?} vs {right:?}")]
    ValenceMismatch { left: (usize, usize), right: (usize, usize) },
    #[error("rank {0} exceeds the supported maximum {MAX_RANK}")]
    RankTooLarge(usize),
    #[error("slot permutation {0:?} is invalid")]
    BadPermutation(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct JetTensor {
    up: usize,
    down: usize,
    degree: usize,
    base: [f64; NVARS],
    entries: Vec<Jet4>,
}

fn pow4(rank: usize) -> usize {
    1 << (2 * rank)
}

/// Decodes a flat position into per-slot indices.
#[inline]
fn decode(mut flat: usize, rank: usize, out: &mut [usize; MAX_RANK]) {
    for k in (0..rank).rev() {
        out[k] = flat & 3;
        flat >>= 2;
    }
}

#[inline]
fn encode(idx: &[usize]) -> usize {
    idx.iter().fold(0, |acc, &i| (acc << 2) | i)
}

impl JetTensor {
    /// Builds a tensor entry by entry. The shared degree is the lowest
    /// degree among the produced entries; higher ones are truncated.
    pub fn from_fn(
        up: usize,
        down: usize,
        mut f: impl FnMut(&[usize]) -> Jet4,
    ) -> Self {
        let rank = up + down;
        assert!(rank <= MAX_RANK, "rank {rank} exceeds {MAX_RANK}");
        let mut idx = [0usize; MAX_RANK];
        let mut entries = Vec::with_capacity(pow4(rank));
        for flat in 0..pow4(rank) {
            decode(flat, rank, &mut idx);
            entries.push(f(&idx[..rank]));
        }
        Self::from_entries(up, down, entries)
    }

    fn from_entries(up: usize, down: usize, mut entries: Vec<Jet4>) -> Self {
        let base = entries[0].base();
        let degree = entries.iter().map(Jet4::degree).min().unwrap_or(0);
        for e in &mut entries {
            assert!(e.base() == base, "tensor entries expanded about different points");
            if e.degree() != degree {
                *e = e.truncate(degree);
            }
        }
        Self {
            up,
            down,
            degree,
            base,
            entries,
        }
    }

    pub fn zeros(up: usize, down: usize, base: [f64; NVARS], degree: usize) -> Self {
        let z = Jet4::zero(base, degree);
        Self::from_fn(up, down, |_| z)
    }

    pub fn scalar(value: Jet4) -> Self {
        Self::from_entries(0, 0, vec![value])
    }

    /// The mixed identity `δ^a_b` as a (1,1) tensor.
    pub fn kronecker(base: [f64; NVARS], degree: usize) -> Self {
        let one = Jet4::constant(1.0, base, degree);
        let zero = Jet4::zero(base, degree);
        Self::from_fn(1, 1, |i| if i[0] == i[1] { one } else { zero })
    }

    pub fn valence(&self) -> (usize, usize) {
        (self.up, self.down)
    }

    pub fn rank(&self) -> usize {
        self.up + self.down
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn base(&self) -> [f64; NVARS] {
        self.base
    }

    pub fn entries(&self) -> &[Jet4] {
        &self.entries
    }

    pub fn get(&self, idx: &[usize]) -> &Jet4 {
        debug_assert_eq!(idx.len(), self.rank());
        &self.entries[encode(idx)]
    }

    pub fn get_mut(&mut self, idx: &[usize]) -> &mut Jet4 {
        &mut self.entries[encode(idx)]
    }

    /// Value (constant term) of one component.
    pub fn value(&self, idx: &[usize]) -> f64 {
        self.get(idx).value()
    }

    /// Component values in storage order.
    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(Jet4::value).collect()
    }

    /// Largest coefficient magnitude over all entries and orders.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| m.max(e.max_abs()))
    }

    /// Largest component value magnitude.
    pub fn max_abs_value(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| m.max(e.value().abs()))
    }

    pub fn truncate(&self, degree: usize) -> Self {
        if degree >= self.degree {
            return self.clone();
        }
        Self {
            degree,
            entries: self.entries.iter().map(|e| e.truncate(degree)).collect(),
            ..*self
        }
    }

    pub fn map(&self, f: impl Fn(&Jet4) -> Jet4) -> Self {
        Self::from_entries(self.up, self.down, self.entries.iter().map(f).collect())
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(&Jet4, &Jet4) -> Jet4) -> Result<Self, TensorError> {
        if self.valence() != other.valence() {
            return Err(TensorError::ValenceMismatch {
                left: self.valence(),
                right: other.valence(),
            });
        }
        Ok(Self::from_entries(
            self.up,
            self.down,
            self.entries.iter().zip(&other.entries).map(|(a, b)| f(a, b)).collect(),
        ))
    }

    pub fn add(&self, other: &Self) -> Result<Self, TensorError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, TensorError> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, factor: f64) -> Self {
        self.map(|e| e.scale(factor))
    }

    /// Multiplies every entry by a scalar field.
    pub fn scale_by(&self, factor: &Jet4) -> Self {
        self.map(|e| e * factor)
    }

    /// Tensor product; slots of `self` precede those of `other` within each
    /// variance block.
    pub fn outer(&self, other: &Self) -> Self {
        let (p1, q1) = self.valence();
        let (p2, q2) = other.valence();
        let mut a = [0usize; MAX_RANK];
        let mut b = [0usize; MAX_RANK];
        Self::from_fn(p1 + p2, q1 + q2, |idx| {
            a[..p1].copy_from_slice(&idx[..p1]);
            b[..p2].copy_from_slice(&idx[p1..p1 + p2]);
            a[p1..p1 + q1].copy_from_slice(&idx[p1 + p2..p1 + p2 + q1]);
            b[p2..p2 + q2].copy_from_slice(&idx[p1 + p2 + q1..]);
            self.get(&a[..p1 + q1]) * other.get(&b[..p2 + q2])
        })
    }

    fn check_slot(&self, slot: usize) -> Result<(), TensorError> {
        if slot >= self.rank() {
            return Err(TensorError::SlotOutOfRange {
                slot,
                rank: self.rank(),
            });
        }
        Ok(())
    }

    fn is_up(&self, slot: usize) -> bool {
        slot < self.up
    }

    /// Sums a contravariant slot against a covariant one.
    pub fn contract(&self, slot_up: usize, slot_down: usize) -> Result<Self, TensorError> {
        self.check_slot(slot_up)?;
        self.check_slot(slot_down)?;
        if !self.is_up(slot_up) {
            return Err(TensorError::SlotKind {
                slot: slot_up,
                expected: "contravariant",
            });
        }
        if self.is_up(slot_down) {
            return Err(TensorError::SlotKind {
                slot: slot_down,
                expected: "covariant",
            });
        }
        let rank = self.rank();
        let mut full = [0usize; MAX_RANK];
        let out = Self::from_fn(self.up - 1, self.down - 1, |idx| {
            let mut src = idx.iter();
            for (k, slot) in full[..rank].iter_mut().enumerate() {
                if k != slot_up && k != slot_down {
                    *slot = *src.next().expect("rank accounting");
                }
            }
            let mut acc = Jet4::zero(self.base, self.degree);
            for i in 0..NVARS {
                full[slot_up] = i;
                full[slot_down] = i;
                acc += self.get(&full[..rank]);
            }
            acc
        });
        Ok(out)
    }

    /// Raises a covariant slot with `g_inv`; the new contravariant slot
    /// becomes the last one of the contravariant block.
    pub fn raise(&self, slot: usize, g_inv: &Self) -> Result<Self, TensorError> {
        self.check_slot(slot)?;
        if self.is_up(slot) {
            return Err(TensorError::SlotKind {
                slot,
                expected: "covariant",
            });
        }
        if g_inv.valence() != (2, 0) {
            return Err(TensorError::WrongMetricValence {
                expected: "(2,0)",
                got: g_inv.valence(),
            });
        }
        let (p, rank) = (self.up, self.rank());
        let mut src = [0usize; MAX_RANK];
        Ok(Self::from_fn(p + 1, self.down - 1, |idx| {
            let new = idx[p];
            src[..p].copy_from_slice(&idx[..p]);
            let mut rest = idx[p + 1..].iter();
            for (k, s) in src[..rank].iter_mut().enumerate().skip(p) {
                if k != slot {
                    *s = *rest.next().expect("rank accounting");
                }
            }
            let mut acc = Jet4::zero(self.base, self.degree.min(g_inv.degree));
            for k in 0..NVARS {
                src[slot] = k;
                acc.add_product(g_inv.get(&[new, k]), self.get(&src[..rank]));
            }
            acc
        }))
    }

    /// Lowers a contravariant slot with `g`; the new covariant slot becomes
    /// the first one of the covariant block.
    pub fn lower(&self, slot: usize, g: &Self) -> Result<Self, TensorError> {
        self.check_slot(slot)?;
        if !self.is_up(slot) {
            return Err(TensorError::SlotKind {
                slot,
                expected: "contravariant",
            });
        }
        if g.valence() != (0, 2) {
            return Err(TensorError::WrongMetricValence {
                expected: "(0,2)",
                got: g.valence(),
            });
        }
        let (p, rank) = (self.up, self.rank());
        let mut src = [0usize; MAX_RANK];
        Ok(Self::from_fn(p - 1, self.down + 1, |idx| {
            let new = idx[p - 1];
            let mut ups = idx[..p - 1].iter();
            for (k, s) in src[..p].iter_mut().enumerate() {
                if k != slot {
                    *s = *ups.next().expect("rank accounting");
                }
            }
            src[p..rank].copy_from_slice(&idx[p..]);
            let mut acc = Jet4::zero(self.base, self.degree.min(g.degree));
            for k in 0..NVARS {
                src[slot] = k;
                acc.add_product(g.get(&[new, k]), self.get(&src[..rank]));
            }
            acc
        }))
    }

    /// Reorders slots: new slot `i` is old slot `perm[i]`. Variance must be
    /// preserved position by position.
    pub fn permute(&self, perm: &[usize]) -> Result<Self, TensorError> {
        let rank = self.rank();
        let mut seen = [false; MAX_RANK];
        let valid = perm.len() == rank
            && perm.iter().enumerate().all(|(i, &s)| {
                s < rank && !std::mem::replace(&mut seen[s], true) && self.is_up(i) == self.is_up(s)
            });
        if !valid {
            return Err(TensorError::BadPermutation(perm.to_vec()));
        }
        let mut src = [0usize; MAX_RANK];
        Ok(Self::from_fn(self.up, self.down, |idx| {
            for (i, &s) in perm.iter().enumerate() {
                src[s] = idx[i];
            }
            *self.get(&src[..rank])
        }))
    }

    fn check_same_variance(&self, slots: &[usize]) -> Result<(), TensorError> {
        for &s in slots {
            self.check_slot(s)?;
        }
        if slots.windows(2).any(|w| self.is_up(w[0]) != self.is_up(w[1])) {
            return Err(TensorError::MixedVariance(slots.to_vec()));
        }
        Ok(())
    }

    fn bracket(&self, slots: &[usize], alternating: bool) -> Result<Self, TensorError> {
        self.check_same_variance(slots)?;
        let perms = permutations(slots.len());
        let weight = 1.0 / perms.len() as f64;
        let rank = self.rank();
        let mut src = [0usize; MAX_RANK];
        Ok(Self::from_fn(self.up, self.down, |idx| {
            src[..rank].copy_from_slice(idx);
            let mut acc = Jet4::zero(self.base, self.degree);
            for (perm, sign) in &perms {
                for (k, &p) in perm.iter().enumerate() {
                    src[slots[k]] = idx[slots[p]];
                }
                let term = self.get(&src[..rank]);
                if alternating && *sign < 0.0 {
                    acc -= term;
                } else {
                    acc += term;
                }
            }
            acc.scale(weight)
        }))
    }

    /// Symmetrization over `slots` with `1/n!` normalization.
    pub fn symmetrize(&self, slots: &[usize]) -> Result<Self, TensorError> {
        self.bracket(slots, false)
    }

    /// Antisymmetrization over `slots` with `1/n!` normalization.
    pub fn antisymmetrize(&self, slots: &[usize]) -> Result<Self, TensorError> {
        self.bracket(slots, true)
    }

    /// `t_ab - ¼ g_ab g^cd t_cd` for a (0,2) tensor.
    pub fn trace_free(&self, g: &Self, g_inv: &Self) -> Result<Self, TensorError> {
        if self.valence() != (0, 2) {
            return Err(TensorError::ValenceMismatch {
                left: self.valence(),
                right: (0, 2),
            });
        }
        let trace = self.trace_with(g_inv)?;
        let quarter = trace.scale(0.25);
        Ok(Self::from_fn(0, 2, |i| self.get(i) - &(g.get(i) * &quarter)))
    }

    /// `g^ab t_ab` for a (0,2) tensor.
    pub fn trace_with(&self, g_inv: &Self) -> Result<Jet4, TensorError> {
        if g_inv.valence() != (2, 0) {
            return Err(TensorError::WrongMetricValence {
                expected: "(2,0)",
                got: g_inv.valence(),
            });
        }
        let mut acc = Jet4::zero(self.base, self.degree.min(g_inv.degree));
        for a in 0..NVARS {
            for b in 0..NVARS {
                acc.add_product(g_inv.get(&[a, b]), self.get(&[a, b]));
            }
        }
        Ok(acc)
    }
}

/// All permutations of `0..n` with their signs.
fn permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<(Vec<usize>, f64)>) {
        if prefix.len() == used.len() {
            let inversions = (0..prefix.len())
                .flat_map(|i| (i + 1..prefix.len()).map(move |j| (i, j)))
                .filter(|&(i, j)| prefix[i] > prefix[j])
                .count();
            let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
            out.push((prefix.clone(), sign));
            return;
        }
        for k in 0..used.len() {
            if !used[k] {
                used[k] = true;
                prefix.push(k);
                rec(prefix, used, out);
                prefix.pop();
                used[k] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Largest coefficient-wise difference between two same-shaped tensors
/// divided by `scale`, where `scale` is floored at `f64::MIN_POSITIVE`.
pub fn relative_difference(a: &JetTensor, b: &JetTensor, scale: f64) -> f64 {
    assert_eq!(a.valence(), b.valence());
    let d = a.degree().min(b.degree());
    let diff = a
        .entries()
        .iter()
        .zip(b.entries())
        .map(|(x, y)| (x.truncate(d) - y.truncate(d)).max_abs())
        .fold(0.0, f64::max);
    diff / scale.max(f64::MIN_POSITIVE)
}

/// [`relative_difference`] scaled by the larger of the two magnitudes.
pub fn normalized_difference(a: &JetTensor, b: &JetTensor) -> f64 {
    let d = a.degree().min(b.degree());
    let scale = a.truncate(d).max_abs().max(b.truncate(d).max_abs());
    relative_difference(a, b, scale)
}
