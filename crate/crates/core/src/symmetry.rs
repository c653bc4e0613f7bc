//! Hypercube automorphisms in (permutation, mask) form.
//!
//! An [`Automorphism`] acts by `apply(x)_i = x_{perm(i)} XOR mask_i`. Pure
//! position permutations (rotations), pure masks (reflections) and all their
//! products are represented exactly this way, and composition stays in this
//! form, so two automorphisms are equal iff their components are.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::bitspace::{BitString, MAX_LEN};
use crate::error::{check_lengths, Error, Result};

/// Largest `n` for which [`hamming_shell`] will enumerate.
pub const SHELL_GUARD: usize = 24;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Automorphism {
    // perm[i - 1] = perm(i) - 1
    perm: Vec<u8>,
    mask: BitString,
}

impl Automorphism {
    pub fn identity(n: usize) -> Result<Self> {
        Ok(Self {
            perm: (0..n as u8).collect(),
            mask: BitString::zeros(n)?,
        })
    }

    /// Rotation from a 1-based permutation: `perm[i - 1]` is the source
    /// position copied into position `i`.
    pub fn rotation(perm: &[usize]) -> Result<Self> {
        let n = perm.len();
        let mask = BitString::zeros(n)?;
        let mut seen = vec![false; n];
        for (i, &p) in perm.iter().enumerate() {
            if !(1..=n).contains(&p) || std::mem::replace(&mut seen[p - 1], true) {
                return Err(Error::InvalidArgument(format!(
                    "not a bijection on 1..={n}: position {} maps to {p}",
                    i + 1
                )));
            }
        }
        Ok(Self {
            perm: perm.iter().map(|&p| (p - 1) as u8).collect(),
            mask,
        })
    }

    pub fn reflection(mask: BitString) -> Self {
        Self {
            perm: (0..mask.len() as u8).collect(),
            mask,
        }
    }

    /// `sigma(i, j) = rotation(swap(i, j)) ∘ reflection(e_i + e_j)` for an
    /// even position `i` and an odd position `j`. Every such map fixes
    /// `z = 1010...10`.
    pub fn swap_generator(i: usize, j: usize, n: usize) -> Result<Self> {
        if !(1..=n).contains(&i) || !(1..=n).contains(&j) {
            return Err(Error::InvalidArgument(format!(
                "positions ({i}, {j}) out of range 1..={n}"
            )));
        }
        if i % 2 != 0 || j % 2 != 1 {
            return Err(Error::InvalidArgument(format!(
                "swap generator needs an even first and an odd second position, got ({i}, {j})"
            )));
        }
        let mut perm: Vec<usize> = (1..=n).collect();
        perm.swap(i - 1, j - 1);
        let mask = BitString::zeros(n)?.with(i, true).with(j, true);
        Self::rotation(&perm)?.compose(&Self::reflection(mask))
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    /// 1-based image of position `i` under the permutation part.
    pub fn perm_at(&self, i: usize) -> usize {
        self.perm[i - 1] as usize + 1
    }

    pub fn perm(&self) -> Vec<usize> {
        self.perm.iter().map(|&p| p as usize + 1).collect()
    }

    pub fn mask(&self) -> BitString {
        self.mask
    }

    pub fn is_identity(&self) -> bool {
        self.mask.word() == 0 && self.perm.iter().enumerate().all(|(i, &p)| i == p as usize)
    }

    pub fn apply(&self, x: &BitString) -> Result<BitString> {
        check_lengths(self.len(), x.len())?;
        Ok(self.apply_unchecked(x))
    }

    #[inline]
    pub(crate) fn apply_unchecked(&self, x: &BitString) -> BitString {
        let n = self.len();
        let src = x.word();
        let mut word = 0u64;
        for &p in &self.perm {
            word = (word << 1) | ((src >> (n - 1 - p as usize)) & 1);
        }
        BitString::from_word_unchecked(n, word ^ self.mask.word())
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Automorphism) -> Result<Automorphism> {
        check_lengths(self.len(), other.len())?;
        // (a ∘ b)(x)_i = x_{pb(pa(i))} ^ mb_{pa(i)} ^ ma_i
        let perm = self.perm.iter().map(|&p| other.perm[p as usize]).collect();
        let mask = self.apply_unchecked(&other.mask);
        Ok(Automorphism { perm, mask })
    }

    pub fn invert(&self) -> Automorphism {
        let n = self.len();
        let mut inv = vec![0u8; n];
        for (i, &p) in self.perm.iter().enumerate() {
            inv[p as usize] = i as u8;
        }
        // mask'_j = mask_{perm^-1(j)}, i.e. the inverse rotation applied to mask
        let rot = Automorphism {
            perm: inv.clone(),
            mask: BitString::from_word_unchecked(n, 0),
        };
        let mask = rot.apply_unchecked(&self.mask);
        Automorphism { perm: inv, mask }
    }

    pub fn stabilizes(&self, x: &BitString) -> Result<bool> {
        Ok(self.apply(x)? == *x)
    }
}

impl fmt::Debug for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Automorphism(perm={:?}, mask={})", self.perm(), self.mask)
    }
}

impl fmt::Display for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let perm: Vec<String> = self.perm().iter().map(ToString::to_string).collect();
        write!(f, "perm=[{}] mask={}", perm.join(" "), self.mask)
    }
}

pub fn rotation(perm: &[usize]) -> Result<Automorphism> {
    Automorphism::rotation(perm)
}

pub fn reflection(mask: BitString) -> Automorphism {
    Automorphism::reflection(mask)
}

pub fn compose(a: &Automorphism, b: &Automorphism) -> Result<Automorphism> {
    a.compose(b)
}

pub fn invert(a: &Automorphism) -> Automorphism {
    a.invert()
}

pub fn swap_generator(i: usize, j: usize, n: usize) -> Result<Automorphism> {
    Automorphism::swap_generator(i, j, n)
}

pub fn stabilizes(a: &Automorphism, x: &BitString) -> Result<bool> {
    a.stabilizes(x)
}

/// All `sigma(i, j)` with `i` even and `j` odd, ordered by `(i, j)`.
pub fn all_swap_generators(n: usize) -> Result<Vec<Automorphism>> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "swap generators need an even positive length, got {n}"
        )));
    }
    let mut out = Vec::with_capacity(n * n / 4);
    for i in (2..=n).step_by(2) {
        for j in (1..=n).step_by(2) {
            out.push(Automorphism::swap_generator(i, j, n)?);
        }
    }
    Ok(out)
}

/// Kinds of random automorphism drawn by [`random_automorphism`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AutomorphismKind {
    Rotation,
    Reflection,
    /// Product of between 2 and `max_len` random rotations and reflections.
    Product { max_len: usize },
}

pub fn random_rotation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Automorphism> {
    let mut perm: Vec<usize> = (1..=n).collect();
    perm.shuffle(rng);
    Automorphism::rotation(&perm)
}

pub fn random_reflection<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Automorphism> {
    if n == 0 || n > MAX_LEN {
        return Err(Error::InvalidArgument(format!("bad length {n}")));
    }
    let word = if n == 64 {
        rng.random::<u64>()
    } else {
        rng.random::<u64>() & ((1u64 << n) - 1)
    };
    Ok(Automorphism::reflection(BitString::from_word(n, word)?))
}

pub fn random_automorphism<R: Rng + ?Sized>(
    n: usize,
    kind: AutomorphismKind,
    rng: &mut R,
) -> Result<Automorphism> {
    match kind {
        AutomorphismKind::Rotation => random_rotation(n, rng),
        AutomorphismKind::Reflection => random_reflection(n, rng),
        AutomorphismKind::Product { max_len } => {
            if max_len < 2 {
                return Err(Error::InvalidArgument(format!(
                    "product length must be at least 2, got {max_len}"
                )));
            }
            let factors = rng.random_range(2..=max_len);
            let mut acc = Automorphism::identity(n)?;
            for _ in 0..factors {
                let f = if rng.random::<bool>() {
                    random_rotation(n, rng)?
                } else {
                    random_reflection(n, rng)?
                };
                acc = f.compose(&acc)?;
            }
            Ok(acc)
        }
    }
}

/// Orbit of a base point under the group generated by a set of maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitSet {
    pub base: BitString,
    pub members: BTreeSet<BitString>,
    pub generators: String,
}

impl OrbitSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, x: &BitString) -> bool {
        self.members.contains(x)
    }
}

/// Breadth-first closure of `{base}` under `generators`.
///
/// For a finite set, closure under the maps coincides with the orbit under the
/// group they generate, so generators need not be closed under inversion.
pub fn orbit_closure(base: BitString, generators: &[Automorphism]) -> Result<OrbitSet> {
    for g in generators {
        check_lengths(base.len(), g.len())?;
    }
    let mut members = BTreeSet::from([base]);
    let mut queue = VecDeque::from([base]);
    while let Some(x) = queue.pop_front() {
        for g in generators {
            let y = g.apply_unchecked(&x);
            if members.insert(y) {
                queue.push_back(y);
            }
        }
    }
    Ok(OrbitSet {
        base,
        members,
        generators: format!("{} generator(s)", generators.len()),
    })
}

/// Orbit of the all-ones target under all `sigma(i, j)`.
pub fn target_orbit(n: usize) -> Result<OrbitSet> {
    let generators = all_swap_generators(n)?;
    let mut orbit = orbit_closure(BitString::ones(n)?, &generators)?;
    orbit.generators = format!("sigma(i,j), i even, j odd, n={n}");
    Ok(orbit)
}

/// Membership in the target orbit via the distance criterion `H(x, z) = n/2`.
pub fn in_target_orbit(x: &BitString, z: &BitString) -> Result<bool> {
    Ok(x.hamming(z)? as usize * 2 == x.len())
}

/// All strings at Hamming distance exactly `k` from `center`.
pub fn hamming_shell(center: &BitString, k: usize) -> Result<BTreeSet<BitString>> {
    let n = center.len();
    if n > SHELL_GUARD {
        return Err(Error::GuardExceeded(format!(
            "shell enumeration limited to n <= {SHELL_GUARD} (got {n}); use Monte Carlo mode"
        )));
    }
    if k > n {
        return Err(Error::InvalidArgument(format!("radius {k} exceeds length {n}")));
    }
    let mut out = BTreeSet::new();
    if k == 0 {
        out.insert(*center);
        return Ok(out);
    }
    // Gosper's hack over k-subsets of the n positions
    let limit = 1u64 << n;
    let mut s: u64 = (1u64 << k) - 1;
    while s < limit {
        out.insert(BitString::from_word_unchecked(n, center.word() ^ s));
        let c = s & s.wrapping_neg();
        let r = s + c;
        s = (((r ^ s) >> 2) / c) | r;
    }
    Ok(out)
}
