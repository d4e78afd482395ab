//! Multi-mode fermionic Fock states over a named mode order.
//!
//! A state is a sparse complex combination of occupation-number basis kets.
//! Mode position 0 is the leftmost label and maps to the most significant
//! bit of the basis index, so `|101>` over `a b c` has index `0b101 = 5`.
//!
//! Anticommutation is tracked through signs rather than operator matrices:
//! ladder operators pick up `(-1)^(occupied modes before the target)`, and
//! reordering modes picks up `(-1)^(inversions among occupied modes)`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hard cap on mode count so basis indices stay comfortably inside `usize`.
pub const MAX_MODES: usize = 16;

/// Amplitudes with modulus at or below this are dropped from storage.
pub const STORAGE_EPS: f64 = 1e-14;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Ordered list of distinct mode labels. The order is physical: exchanging
/// two occupied modes costs a sign.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeOrder {
    labels: Vec<String>,
}

impl ModeOrder {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::BadModeOrder("no modes given".into()));
        }
        if labels.len() > MAX_MODES {
            return Err(Error::BadModeOrder(format!(
                "{} modes exceeds the supported maximum of {MAX_MODES}",
                labels.len()
            )));
        }
        for label in &labels {
            if label.is_empty() {
                return Err(Error::BadModeOrder("empty mode label".into()));
            }
            if !label.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '_') {
                return Err(Error::BadModeOrder(format!(
                    "label `{label}` has characters outside [A-Za-z0-9_]"
                )));
            }
        }
        for (i, label) in labels.iter().enumerate() {
            if labels[..i].contains(label) {
                return Err(Error::DuplicateMode(label.clone()));
            }
        }
        Ok(ModeOrder { labels })
    }

    /// Rearrangement of labels already validated elsewhere.
    pub(crate) fn from_vec_unchecked(labels: Vec<String>) -> Self {
        ModeOrder { labels }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, position: usize) -> &str {
        &self.labels[position]
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn dim(&self) -> usize {
        1 << self.labels.len()
    }

    pub fn is_permutation_of(&self, other: &ModeOrder) -> bool {
        self.labels.len() == other.labels.len()
            && self.labels.iter().all(|l| other.position(l).is_some())
    }

    /// Order with the given labels removed, survivors keeping their relative order.
    pub(crate) fn without(&self, removed: &[usize]) -> ModeOrder {
        let labels = self
            .labels
            .iter()
            .enumerate()
            .filter(|(p, _)| !removed.contains(p))
            .map(|(_, l)| l.clone())
            .collect();
        ModeOrder { labels }
    }
}

impl fmt::Display for ModeOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.labels.join(" "))
    }
}

/// Map from positions in `old` to positions in `new`. Errors unless the two
/// orders carry exactly the same label set.
pub(crate) fn permutation_to(old: &ModeOrder, new: &ModeOrder) -> Result<Vec<usize>> {
    if !old.is_permutation_of(new) {
        return Err(Error::OrderMismatch(old.to_string(), new.to_string()));
    }
    Ok(old
        .labels
        .iter()
        .map(|l| new.position(l).expect("checked permutation"))
        .collect())
}

/// Basis index remap for one occupation pattern under a mode permutation.
/// The sign counts inversions among occupied modes: each occupied pair that
/// swaps its relative order contributes one factor of -1.
pub(crate) fn reorder_code(code: usize, n: usize, perm: &[usize]) -> (usize, f64) {
    let mut targets = [0usize; MAX_MODES];
    let mut k = 0;
    for p in 0..n {
        if code >> (n - 1 - p) & 1 == 1 {
            targets[k] = perm[p];
            k += 1;
        }
    }
    let mut inversions = 0u32;
    let mut new_code = 0usize;
    for i in 0..k {
        new_code |= 1 << (n - 1 - targets[i]);
        for j in (i + 1)..k {
            if targets[i] > targets[j] {
                inversions += 1;
            }
        }
    }
    (new_code, if inversions % 2 == 0 { 1.0 } else { -1.0 })
}

/// One occupation-number basis ket, e.g. `|011>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisState {
    modes: usize,
    code: usize,
}

impl BasisState {
    pub fn new(code: usize, modes: usize) -> Self {
        assert!(modes >= 1 && modes <= MAX_MODES, "mode count {modes} out of range");
        assert!(code < 1 << modes, "code {code} out of range for {modes} modes");
        BasisState { modes, code }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        assert!(!bits.is_empty() && bits.len() <= MAX_MODES);
        let mut code = 0;
        for &b in bits {
            code = code << 1 | usize::from(b);
        }
        BasisState { modes: bits.len(), code }
    }

    pub fn from_bit_str(s: &str) -> Result<Self> {
        if s.is_empty() || s.len() > MAX_MODES {
            return Err(Error::BadModeOrder(format!(
                "occupation string `{s}` must have 1 to {MAX_MODES} digits"
            )));
        }
        let mut code = 0;
        for ch in s.chars() {
            code = code << 1
                | match ch {
                    '0' => 0,
                    '1' => 1,
                    _ => {
                        return Err(Error::BadModeOrder(format!(
                            "occupation string `{s}` has a character other than 0/1"
                        )))
                    }
                };
        }
        Ok(BasisState { modes: s.len(), code })
    }

    /// Basis index: first mode is the most significant bit.
    pub fn index(&self) -> usize {
        self.code
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn occupied(&self, position: usize) -> bool {
        debug_assert!(position < self.modes);
        self.code >> (self.modes - 1 - position) & 1 == 1
    }

    pub fn occupation_count(&self) -> u32 {
        self.code.count_ones()
    }

    /// Number of occupied modes strictly before `position`.
    pub fn occupied_before(&self, position: usize) -> u32 {
        debug_assert!(position < self.modes);
        (self.code >> (self.modes - position)).count_ones()
    }

    pub fn toggled(&self, position: usize) -> Self {
        debug_assert!(position < self.modes);
        BasisState {
            modes: self.modes,
            code: self.code ^ (1 << (self.modes - 1 - position)),
        }
    }

    pub fn parity(&self) -> Parity {
        if self.occupation_count() % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Sign `(-1)^(k(k-1)/2)` a k-particle ket acquires under the braided
    /// adjoint, from reversing its k creation operators.
    pub fn braided_sign(&self) -> f64 {
        let k = self.occupation_count() as u64;
        if (k * k.saturating_sub(1) / 2) % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for p in 0..self.modes {
            write!(f, "{}", u8::from(self.occupied(p)))?;
        }
        write!(f, ">")
    }
}

/// Particle-number parity sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    /// Support on both sectors.
    Mixed,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parity::Even => write!(f, "even"),
            Parity::Odd => write!(f, "odd"),
            Parity::Mixed => write!(f, "mixed"),
        }
    }
}

/// Outcome of a parity-superselection check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SsrVerdict {
    Valid,
    Violation(String),
}

impl SsrVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, SsrVerdict::Valid)
    }
}

impl fmt::Display for SsrVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SsrVerdict::Valid => write!(f, "valid"),
            SsrVerdict::Violation(why) => write!(f, "violation ({why})"),
        }
    }
}

/// Sparse vector in the fermionic Fock space of a fixed mode order.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    order: ModeOrder,
    terms: BTreeMap<BasisState, Complex64>,
}

impl FockVector {
    pub fn zero(order: ModeOrder) -> Self {
        FockVector { order, terms: BTreeMap::new() }
    }

    pub fn vacuum(order: ModeOrder) -> Self {
        let n = order.len();
        let mut v = FockVector::zero(order);
        v.terms.insert(BasisState::new(0, n), c(1.0, 0.0));
        v
    }

    pub fn basis(order: ModeOrder, state: BasisState) -> Result<Self> {
        if state.modes() != order.len() {
            return Err(Error::WrongModeCount { expected: order.len(), found: state.modes() });
        }
        let mut v = FockVector::zero(order);
        v.terms.insert(state, c(1.0, 0.0));
        Ok(v)
    }

    pub fn from_terms<I>(order: ModeOrder, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BasisState, Complex64)>,
    {
        let mut v = FockVector::zero(order);
        for (bs, amp) in terms {
            if bs.modes() != v.order.len() {
                return Err(Error::WrongModeCount { expected: v.order.len(), found: bs.modes() });
            }
            *v.terms.entry(bs).or_insert_with(|| c(0.0, 0.0)) += amp;
        }
        v.prune();
        Ok(v)
    }

    fn prune(&mut self) {
        self.terms.retain(|_, amp| amp.norm() > STORAGE_EPS);
    }

    pub fn order(&self) -> &ModeOrder {
        &self.order
    }

    pub fn num_modes(&self) -> usize {
        self.order.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (BasisState, Complex64)> + '_ {
        self.terms.iter().map(|(bs, amp)| (*bs, *amp))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn amplitude(&self, state: BasisState) -> Complex64 {
        self.terms.get(&state).copied().unwrap_or_else(|| c(0.0, 0.0))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let mut v = self.clone();
        for amp in v.terms.values_mut() {
            *amp *= factor;
        }
        v.prune();
        v
    }

    pub fn add(&self, other: &FockVector) -> Result<Self> {
        if self.order != other.order {
            return Err(Error::OrderMismatch(self.order.to_string(), other.order.to_string()));
        }
        let mut v = self.clone();
        for (bs, amp) in &other.terms {
            *v.terms.entry(*bs).or_insert_with(|| c(0.0, 0.0)) += amp;
        }
        v.prune();
        Ok(v)
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroState("normalization"));
        }
        Ok(self.scaled(c(1.0 / n, 0.0)))
    }

    /// Dense amplitude vector indexed by basis code.
    pub fn dense(&self) -> Vec<Complex64> {
        let mut out = vec![c(0.0, 0.0); self.order.dim()];
        for (bs, amp) in &self.terms {
            out[bs.index()] = *amp;
        }
        out
    }

    fn ladder(&self, label: &str, create: bool) -> Result<Self> {
        let p = self
            .order
            .position(label)
            .ok_or_else(|| Error::UnknownMode(label.to_string()))?;
        let mut out = FockVector::zero(self.order.clone());
        for (bs, amp) in &self.terms {
            if bs.occupied(p) == create {
                continue;
            }
            let sign = if bs.occupied_before(p) % 2 == 0 { 1.0 } else { -1.0 };
            let target = bs.toggled(p);
            *out.terms.entry(target).or_insert_with(|| c(0.0, 0.0)) += amp * sign;
        }
        out.prune();
        Ok(out)
    }

    /// Creation operator for the labeled mode. A doubly occupied target kills
    /// the term; surviving terms gain `(-1)^(occupied modes before target)`.
    pub fn apply_creation(&self, label: &str) -> Result<Self> {
        self.ladder(label, true)
    }

    /// Annihilation operator for the labeled mode, with the same sign rule.
    pub fn apply_annihilation(&self, label: &str) -> Result<Self> {
        self.ladder(label, false)
    }

    /// Rewrite the state over a permuted mode order. Every occupied pair
    /// whose relative order flips contributes a factor of -1.
    pub fn reorder_modes(&self, new_order: &ModeOrder) -> Result<Self> {
        let perm = permutation_to(&self.order, new_order)?;
        let n = self.order.len();
        let mut out = FockVector::zero(new_order.clone());
        for (bs, amp) in &self.terms {
            let (new_code, sign) = reorder_code(bs.index(), n, &perm);
            out.terms.insert(BasisState::new(new_code, n), amp * sign);
        }
        Ok(out)
    }

    /// Coefficient list of the braided dual: each ket's amplitude is
    /// conjugated and weighted by the ket's [`BasisState::braided_sign`].
    pub fn braided_adjoint_signs(&self) -> Vec<(BasisState, Complex64)> {
        self.terms
            .iter()
            .map(|(bs, amp)| (*bs, amp.conj() * bs.braided_sign()))
            .collect()
    }

    /// Inner product with the basis kets orthonormal; the braided-dual signs
    /// cancel against the matching signs in the dual pairing, leaving the
    /// plain sesquilinear sum.
    pub fn inner_product(&self, other: &FockVector) -> Result<Complex64> {
        if self.order != other.order {
            return Err(Error::OrderMismatch(self.order.to_string(), other.order.to_string()));
        }
        let mut acc = c(0.0, 0.0);
        for (bs, amp) in &self.terms {
            acc += amp.conj() * other.amplitude(*bs);
        }
        Ok(acc)
    }

    /// Parity sector of the support. Errors on the zero state.
    pub fn parity(&self) -> Result<Parity> {
        let mut seen_even = false;
        let mut seen_odd = false;
        for bs in self.terms.keys() {
            match bs.parity() {
                Parity::Even => seen_even = true,
                Parity::Odd => seen_odd = true,
                Parity::Mixed => unreachable!(),
            }
        }
        match (seen_even, seen_odd) {
            (false, false) => Err(Error::ZeroState("parity")),
            (true, false) => Ok(Parity::Even),
            (false, true) => Ok(Parity::Odd),
            (true, true) => Ok(Parity::Mixed),
        }
    }

    /// A pure state respects parity superselection iff its support sits in a
    /// single parity sector. The zero state passes vacuously.
    pub fn ssr_check(&self) -> SsrVerdict {
        match self.parity() {
            Err(_) | Ok(Parity::Even) | Ok(Parity::Odd) => SsrVerdict::Valid,
            Ok(Parity::Mixed) => {
                let even = self
                    .terms
                    .keys()
                    .find(|bs| bs.parity() == Parity::Even)
                    .expect("mixed parity has an even term");
                let odd = self
                    .terms
                    .keys()
                    .find(|bs| bs.parity() == Parity::Odd)
                    .expect("mixed parity has an odd term");
                SsrVerdict::Violation(format!(
                    "support spans both parity sectors, e.g. {even} and {odd}"
                ))
            }
        }
    }

    pub fn approx_eq(&self, other: &FockVector, tol: f64) -> bool {
        if self.order != other.order {
            return false;
        }
        let keys: std::collections::BTreeSet<_> =
            self.terms.keys().chain(other.terms.keys()).collect();
        keys.into_iter()
            .all(|bs| (self.amplitude(*bs) - other.amplitude(*bs)).norm() <= tol)
    }
}
