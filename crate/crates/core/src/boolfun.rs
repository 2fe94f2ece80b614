//! Bit-packed truth tables and the cryptographic metrics computed on them.
//!
//! Index convention: the input vector `(x_{n-1}, ..., x_0)` is stored at index
//! `sum x_j * 2^j`, so variable `j` carries bit-weight `2^j`. Constructions that
//! append variables place them above the seed variables; for the two-variable
//! constructions `v_0` is the most significant index bit and `v_1` the next.
//! Every metric in this module (weight, spectrum magnitudes, nonlinearity) is
//! invariant under input permutation, so the convention only shows up in raw
//! tables and in the spectrum index layout.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::Rng;

use crate::error::{Error, Result};

/// Largest supported variable count (16 Mi-entry tables).
pub const MAX_VARS: u32 = 24;

const WORD_BITS: usize = 64;

/// Low-variable masks: `VAR_MASKS[j]` has bit `i` set iff bit `j` of `i` is set.
const VAR_MASKS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

/// Truth table of an `n`-variable Boolean function, 64 values per word.
///
/// For `n < 6` only the low `2^n` bits of the single word are used and the
/// rest are kept at zero.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TruthTable {
    n: u32,
    words: Vec<u64>,
}

impl std::fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TruthTable(n={}, 0x{})", self.n, self.to_hex())
    }
}

pub(crate) fn word_count(n: u32) -> usize {
    if n >= 6 {
        1 << (n - 6)
    } else {
        1
    }
}

pub(crate) fn tail_mask(n: u32) -> u64 {
    if n >= 6 {
        u64::MAX
    } else {
        (1u64 << (1u32 << n)) - 1
    }
}

fn check_n(n: u32) -> Result<()> {
    if n == 0 || n > MAX_VARS {
        return Err(Error::VariableCount { n, max: MAX_VARS });
    }
    Ok(())
}

impl TruthTable {
    /// The constant-zero function.
    pub fn zero(n: u32) -> Result<Self> {
        check_n(n)?;
        Ok(Self { n, words: vec![0; word_count(n)] })
    }

    pub fn from_fn(n: u32, mut f: impl FnMut(usize) -> bool) -> Result<Self> {
        let mut t = Self::zero(n)?;
        for x in 0..t.len() {
            if f(x) {
                t.words[x / WORD_BITS] |= 1 << (x % WORD_BITS);
            }
        }
        Ok(t)
    }

    pub fn from_bits(n: u32, bits: &[bool]) -> Result<Self> {
        check_n(n)?;
        let expected = 1usize << n;
        if bits.len() != expected {
            return Err(Error::LengthMismatch { expected, found: bits.len() });
        }
        Self::from_fn(n, |x| bits[x])
    }

    /// Builds a table from packed words; bits above `2^n` must be zero.
    pub fn from_words(n: u32, words: Vec<u64>) -> Result<Self> {
        check_n(n)?;
        let expected = word_count(n);
        if words.len() != expected {
            return Err(Error::LengthMismatch { expected: expected * WORD_BITS, found: words.len() * WORD_BITS });
        }
        if words[0] & !tail_mask(n) != 0 {
            return Err(Error::TableFormat(format!("bits set beyond 2^{n} entries")));
        }
        Ok(Self { n, words })
    }

    /// Crate-internal constructor that masks stray high bits instead of rejecting them.
    pub(crate) fn from_words_masked(n: u32, mut words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), word_count(n));
        if n < 6 {
            words[0] &= tail_mask(n);
        }
        Self { n, words }
    }

    /// Coordinate function `x_j` on `n` variables.
    pub fn variable(n: u32, j: u32) -> Result<Self> {
        check_n(n)?;
        if j >= n {
            return Err(Error::Precondition(format!("variable index {j} >= n = {n}")));
        }
        Ok(Self::from_words_masked(n, variable_words(n, j)))
    }

    /// Inner-product bent function `x_0 x_1 + x_2 x_3 + ...` (n even).
    pub fn inner_product(n: u32) -> Result<Self> {
        if n % 2 != 0 {
            return Err(Error::Precondition(format!("inner-product function needs even n, got {n}")));
        }
        Self::from_fn(n, |x| {
            let mut acc = 0;
            for i in (0..n).step_by(2) {
                acc ^= ((x >> i) & (x >> (i + 1))) & 1;
            }
            acc == 1
        })
    }

    /// Uniformly random function.
    pub fn random<R: Rng + ?Sized>(n: u32, rng: &mut R) -> Result<Self> {
        check_n(n)?;
        let words = (0..word_count(n)).map(|_| rng.gen::<u64>()).collect();
        Ok(Self::from_words_masked(n, words))
    }

    /// Uniformly random balanced function (weight exactly `2^{n-1}`).
    pub fn random_balanced<R: Rng + ?Sized>(n: u32, rng: &mut R) -> Result<Self> {
        check_n(n)?;
        let len = 1usize << n;
        let mut idx: Vec<usize> = (0..len).collect();
        let (ones, _) = rand::seq::SliceRandom::partial_shuffle(&mut idx[..], rng, len / 2);
        let mut t = Self::zero(n)?;
        for &x in ones.iter() {
            t.set(x, true);
        }
        Ok(t)
    }

    pub fn num_vars(&self) -> u32 {
        self.n
    }

    /// Number of entries, `2^n`.
    pub fn len(&self) -> usize {
        1 << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, x: usize) -> bool {
        (self.words[x / WORD_BITS] >> (x % WORD_BITS)) & 1 == 1
    }

    pub fn set(&mut self, x: usize, value: bool) {
        let bit = 1u64 << (x % WORD_BITS);
        if value {
            self.words[x / WORD_BITS] |= bit;
        } else {
            self.words[x / WORD_BITS] &= !bit;
        }
    }

    /// Hamming weight `w_H(f)`.
    pub fn weight(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    pub fn is_balanced(&self) -> bool {
        self.weight() * 2 == self.len() as u64
    }

    pub fn complement(&self) -> Self {
        let words = self.words.iter().map(|w| !w).collect();
        Self::from_words_masked(self.n, words)
    }

    pub fn xor(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "xor of tables with different n");
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect();
        Self { n: self.n, words }
    }

    pub fn and(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "and of tables with different n");
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect();
        Self { n: self.n, words }
    }

    /// Concatenates `2^m` equal-size tables into one `n + m` variable table.
    /// Block `b` occupies indices `b * 2^n .. (b + 1) * 2^n`.
    pub fn concat(blocks: &[&TruthTable]) -> Result<Self> {
        let count = blocks.len();
        if count == 0 || !count.is_power_of_two() {
            return Err(Error::Precondition(format!("block count {count} is not a power of two")));
        }
        let n = blocks[0].n;
        if blocks.iter().any(|b| b.n != n) {
            return Err(Error::SeedShape("blocks have different variable counts".into()));
        }
        let total = n + count.trailing_zeros();
        check_n(total)?;
        if n >= 6 {
            let words = blocks.iter().flat_map(|b| b.words.iter().copied()).collect();
            return Ok(Self { n: total, words });
        }
        let block_len = 1usize << n;
        let mut out = Self::zero(total)?;
        for (b, block) in blocks.iter().enumerate() {
            let base = b * block_len;
            let word = &mut out.words[base / WORD_BITS];
            *word |= block.words[0] << (base % WORD_BITS);
        }
        Ok(out)
    }

    /// Extends to `n + extra` variables, ignoring the new (most significant) inputs.
    pub fn lift(&self, extra: u32) -> Result<Self> {
        let copies = 1usize << extra;
        let blocks: Vec<&TruthTable> = std::iter::repeat(self).take(copies).collect();
        Self::concat(&blocks)
    }

    /// Hexadecimal body: `ceil(2^n / 4)` digits, most significant index first.
    pub fn to_hex(&self) -> String {
        let digits = hex_digits(self.n);
        let mut s = String::with_capacity(digits);
        for d in (0..digits).rev() {
            let bit = d * 4;
            let nibble = (self.words[bit / WORD_BITS] >> (bit % WORD_BITS)) & 0xF;
            write!(s, "{nibble:x}").expect("write to String");
        }
        s
    }

    pub fn from_hex(n: u32, hex: &str) -> Result<Self> {
        check_n(n)?;
        let hex = hex.trim();
        let digits = hex_digits(n);
        if hex.len() != digits {
            return Err(Error::TableFormat(format!(
                "expected {digits} hex digits for n={n}, found {}",
                hex.len()
            )));
        }
        let mut words = vec![0u64; word_count(n)];
        for (i, c) in hex.chars().enumerate() {
            let nibble = c
                .to_digit(16)
                .ok_or_else(|| Error::TableFormat(format!("invalid hex digit {c:?}")))? as u64;
            let bit = (digits - 1 - i) * 4;
            words[bit / WORD_BITS] |= nibble << (bit % WORD_BITS);
        }
        Self::from_words(n, words)
    }

    /// File form: header line `n=<k>` followed by the hex body.
    pub fn to_file_string(&self) -> String {
        format!("n={}\n{}\n", self.n, self.to_hex())
    }

    pub fn parse_file_string(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::TableFormat("empty truth-table file".into()))?;
        let n: u32 = header
            .strip_prefix("n=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| Error::TableFormat(format!("bad header {header:?}")))?;
        let body = lines
            .next()
            .ok_or_else(|| Error::TableFormat("missing table body".into()))?;
        if lines.next().is_some() {
            return Err(Error::TableFormat("trailing content after table body".into()));
        }
        Self::from_hex(n, body)
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_file_string()).map_err(|e| Error::io(path, e))
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_file_string(&text)
    }
}

fn hex_digits(n: u32) -> usize {
    ((1usize << n) / 4).max(1)
}

/// Packed words of the coordinate function `x_j` on `n` variables.
pub(crate) fn variable_words(n: u32, j: u32) -> Vec<u64> {
    let count = word_count(n);
    if j < 6 {
        vec![VAR_MASKS[j as usize] & tail_mask(n); count]
    } else {
        let stride = 1usize << (j - 6);
        (0..count)
            .map(|w| if w & stride != 0 { u64::MAX } else { 0 })
            .collect()
    }
}

/// Walsh-Hadamard spectrum `W_f(a) = sum_x (-1)^{f(x) + a.x}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalshSpectrum {
    n: u32,
    coeffs: Vec<i32>,
}

impl WalshSpectrum {
    pub fn num_vars(&self) -> u32 {
        self.n
    }

    pub fn coeffs(&self) -> &[i32] {
        &self.coeffs
    }

    pub fn get(&self, a: usize) -> i32 {
        self.coeffs[a]
    }

    pub fn max_abs(&self) -> u32 {
        self.coeffs.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
    }

    /// Number of positions whose magnitude equals the maximum magnitude.
    pub fn max_abs_count(&self) -> usize {
        let m = self.max_abs();
        self.coeffs.iter().filter(|c| c.unsigned_abs() == m).count()
    }

    /// `sum_a W(a)^2`; equals `2^{2n}` for every Boolean function.
    pub fn energy(&self) -> u64 {
        self.coeffs.iter().map(|&c| (i64::from(c) * i64::from(c)) as u64).sum()
    }
}

/// Fast in-place butterfly, `O(n 2^n)` integer operations.
pub fn walsh_transform(f: &TruthTable) -> WalshSpectrum {
    let len = f.len();
    let mut coeffs: Vec<i32> = (0..len).map(|x| if f.get(x) { -1 } else { 1 }).collect();
    let mut half = 1;
    while half < len {
        for block in coeffs.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (u, v) in lo.iter_mut().zip(hi.iter_mut()) {
                let (a, b) = (*u, *v);
                *u = a + b;
                *v = a - b;
            }
        }
        half *= 2;
    }
    WalshSpectrum { n: f.num_vars(), coeffs }
}

/// `Nl_f = 2^{n-1} - max_a |W_f(a)| / 2`.
pub fn nonlinearity(f: &TruthTable) -> u64 {
    nonlinearity_from_spectrum(&walsh_transform(f))
}

pub fn nonlinearity_from_spectrum(w: &WalshSpectrum) -> u64 {
    (1u64 << (w.n - 1)) - u64::from(w.max_abs()) / 2
}

/// Number of bit flips needed to balance `f`: `|w_H(f) - 2^{n-1}|`.
pub fn balancedness_penalty(f: &TruthTable) -> u64 {
    f.weight().abs_diff(1u64 << (f.num_vars() - 1))
}

/// Covering-radius bound `2^{n-1} - 2^{n/2-1}`; not an integer for odd `n`.
pub fn covering_radius_bound(n: u32) -> f64 {
    2f64.powi(n as i32 - 1) - 2f64.powf(f64::from(n) / 2.0 - 1.0)
}

/// Bent iff `n` is even and the covering-radius bound is met.
pub fn is_bent(f: &TruthTable) -> bool {
    let n = f.num_vars();
    n % 2 == 0 && nonlinearity(f) == (1u64 << (n - 1)) - (1u64 << (n / 2 - 1))
}

/// Concatenation construction on `n + 2` variables:
/// `F(v_0, v_1, v) = f0(v)` when `v_0 = 1`, `f1(v) + v_1` when `v_0 = 0`.
///
/// `v_0` is index bit `n + 1` and `v_1` is index bit `n`, so the table is
/// `f1 || !f1 || f0 || f0` in ascending index order.
pub fn concatenation_construct(f0: &TruthTable, f1: &TruthTable) -> Result<TruthTable> {
    if f0.num_vars() != f1.num_vars() {
        return Err(Error::SeedShape(format!(
            "concatenation seeds have n={} and n={}",
            f0.num_vars(),
            f1.num_vars()
        )));
    }
    let not_f1 = f1.complement();
    TruthTable::concat(&[f1, &not_f1, f0, f0])
}

/// Checks the concatenation spectrum identity coefficient by coefficient.
///
/// For `A = a + 2^n b_1 + 2^{n+1} b_0` (with `b_1` the mask bit of `v_1` and
/// `b_0` that of `v_0`) the identity is `W_F(A) = 2 (-1)^{b_0} W_{f0}(a)` when
/// `b_1 = 0` and `W_F(A) = 2 W_{f1}(a)` when `b_1 = 1`.
pub fn lemma1_spectrum_check(f0: &TruthTable, f1: &TruthTable) -> Result<bool> {
    let big = concatenation_construct(f0, f1)?;
    let wf = walsh_transform(&big);
    let w0 = walsh_transform(f0);
    let w1 = walsh_transform(f1);
    let n = f0.num_vars();
    let low = 1usize << n;
    Ok(wf.coeffs().iter().enumerate().all(|(idx, &c)| {
        let a = idx & (low - 1);
        let b1 = (idx >> n) & 1;
        let b0 = (idx >> (n + 1)) & 1;
        let expected = if b1 == 0 {
            let s = if b0 == 0 { 2 } else { -2 };
            s * w0.get(a)
        } else {
            2 * w1.get(a)
        };
        c == expected
    }))
}

/// Rothaus construction of an `n + 2` variable bent function from three bent
/// `n`-variable functions whose sum is also bent.
///
/// `x_{n+1}` is index bit `n` and `x_{n+2}` is index bit `n + 1`.
pub fn rothaus_construct(h1: &TruthTable, h2: &TruthTable, h3: &TruthTable) -> Result<TruthTable> {
    let n = h1.num_vars();
    if h2.num_vars() != n || h3.num_vars() != n {
        return Err(Error::SeedShape("Rothaus inputs have different variable counts".into()));
    }
    if n % 2 != 0 {
        return Err(Error::Precondition(format!("Rothaus construction needs even n, got {n}")));
    }
    let sum = h1.xor(h2).xor(h3);
    for (name, h) in [("h1", h1), ("h2", h2), ("h3", h3), ("h1+h2+h3", &sum)] {
        if !is_bent(h) {
            return Err(Error::Precondition(format!("{name} is not bent")));
        }
    }
    let majority = {
        let words = (0..h1.words.len())
            .map(|i| {
                let (a, b, c) = (h1.words[i], h2.words[i], h3.words[i]);
                (a & b) ^ (a & c) ^ (b & c)
            })
            .collect();
        TruthTable::from_words_masked(n, words)
    };
    let d12 = h1.xor(h2);
    let d13 = h1.xor(h3);
    let block00 = majority.clone();
    let block10 = majority.xor(&d12);
    let block01 = majority.xor(&d13);
    let block11 = majority.xor(&d12).xor(&d13).complement();
    TruthTable::concat(&[&block00, &block10, &block01, &block11])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn naive_walsh(f: &TruthTable) -> Vec<i32> {
        let len = f.len();
        (0..len)
            .map(|a| {
                (0..len)
                    .map(|x| {
                        let e = f.get(x) as u32 ^ ((a & x).count_ones() & 1);
                        if e == 0 { 1 } else { -1 }
                    })
                    .sum()
            })
            .collect()
    }

    /// Minimum distance to all `2^{n+1}` affine functions, by enumeration.
    fn naive_nonlinearity(f: &TruthTable) -> u64 {
        let len = f.len();
        let mut best = u64::MAX;
        for a in 0..len {
            let d = (0..len)
                .filter(|&x| f.get(x) != ((a & x).count_ones() & 1 == 1))
                .count() as u64;
            best = best.min(d).min(len as u64 - d);
        }
        best
    }

    #[test]
    fn constant_zero_spectrum() {
        let f = TruthTable::zero(3).unwrap();
        assert_eq!(walsh_transform(&f).coeffs(), &[8, 0, 0, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn coordinate_spectrum_sign() {
        let f = TruthTable::variable(2, 0).unwrap();
        let w = walsh_transform(&f);
        assert_eq!(w.coeffs(), naive_walsh(&f).as_slice());
        // only a = 1 correlates: x_0 + a.x is constant exactly when a = 1
        assert_eq!(w.coeffs(), &[0, 4, 0, 0]);
    }

    #[test]
    fn fast_matches_naive_n8() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let f = TruthTable::random(8, &mut rng).unwrap();
            assert_eq!(walsh_transform(&f).coeffs(), naive_walsh(&f).as_slice());
        }
    }

    #[test]
    fn linear_function_has_zero_nonlinearity() {
        let f = TruthTable::from_fn(5, |x| (x & 0b10110).count_ones() % 2 == 1).unwrap();
        assert_eq!(nonlinearity(&f), 0);
    }

    #[test]
    fn inner_product_is_bent() {
        let f = TruthTable::inner_product(4).unwrap();
        assert_eq!(naive_nonlinearity(&f), 6);
        assert_eq!(nonlinearity(&f), 6);
        assert!(is_bent(&f));
        assert_eq!(f.weight(), 6);
    }

    #[test]
    fn balancedness_examples() {
        assert_eq!(balancedness_penalty(&TruthTable::zero(4).unwrap()), 8);
        for n in 1..8 {
            assert_eq!(balancedness_penalty(&TruthTable::variable(n, 0).unwrap()), 0);
        }
        let f = TruthTable::from_fn(4, |x| x < 7).unwrap();
        assert_eq!(balancedness_penalty(&f), 1);
    }

    #[test]
    fn concatenation_block_layout() {
        let z = TruthTable::zero(2).unwrap();
        let f = concatenation_construct(&z, &z).unwrap();
        assert_eq!(f.num_vars(), 4);
        for x in 0..16 {
            let v0 = (x >> 3) & 1;
            let v1 = (x >> 2) & 1;
            let expected = v0 == 0 && v1 == 1;
            assert_eq!(f.get(x), expected, "index {x}");
        }
        assert_eq!(f.weight(), 4);
        assert_eq!(balancedness_penalty(&f), 4);
        assert!(lemma1_spectrum_check(&z, &z).unwrap());
    }

    #[test]
    fn concatenation_rejects_mismatched_sizes() {
        let a = TruthTable::zero(3).unwrap();
        let b = TruthTable::zero(4).unwrap();
        assert!(concatenation_construct(&a, &b).is_err());
        assert!(lemma1_spectrum_check(&a, &b).is_err());
    }

    #[test]
    fn concatenation_of_nl4_seeds_gives_24() {
        // x_3 + x_0 x_1 + x_2 ... any balanced 4-variable function of nonlinearity 4
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut seeds = Vec::new();
        while seeds.len() < 2 {
            let f = TruthTable::random_balanced(4, &mut rng).unwrap();
            if nonlinearity(&f) == 4 {
                seeds.push(f);
            }
        }
        let big = concatenation_construct(&seeds[0], &seeds[1]).unwrap();
        assert!(big.is_balanced());
        assert_eq!(naive_nonlinearity(&big), 24);
        assert_eq!(nonlinearity(&big), 24);
    }

    #[test]
    fn rothaus_identical_inputs() {
        let h = TruthTable::inner_product(4).unwrap();
        let f = rothaus_construct(&h, &h, &h).unwrap();
        assert_eq!(nonlinearity(&f), 28);
        // collapses to h(x) + x_{n+1} x_{n+2}
        let g = TruthTable::from_fn(6, |x| h.get(x & 15) ^ ((x >> 4) & (x >> 5) & 1 == 1)).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn rothaus_rejects_bad_inputs() {
        let h = TruthTable::inner_product(4).unwrap();
        let z = TruthTable::zero(4).unwrap();
        let err = rothaus_construct(&h, &z, &h).unwrap_err().to_string();
        assert!(err.contains("h2"), "{err}");
        let odd = TruthTable::zero(3).unwrap();
        assert!(rothaus_construct(&odd, &odd, &odd).is_err());
    }

    #[test]
    fn hex_file_round_trip_and_rejects() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=9 {
            let f = TruthTable::random(n, &mut rng).unwrap();
            let back = TruthTable::parse_file_string(&f.to_file_string()).unwrap();
            assert_eq!(f, back);
        }
        assert!(TruthTable::parse_file_string("n=4\n0f0\n").is_err());
        assert!(TruthTable::parse_file_string("n=2\nf0\n").is_err());
        assert!(TruthTable::parse_file_string("n=2\n1f\n").is_err());
        assert!(TruthTable::parse_file_string("n=3\nzz\n").is_err());
        let f = TruthTable::variable(3, 0).unwrap();
        assert_eq!(f.to_hex(), "aa");
    }

    #[test]
    fn variable_words_high() {
        let f = TruthTable::variable(8, 7).unwrap();
        for x in 0..256 {
            assert_eq!(f.get(x), x >= 128);
        }
    }

    #[test]
    fn lift_repeats_blocks() {
        let f = TruthTable::variable(3, 1).unwrap();
        let g = f.lift(4).unwrap();
        for x in 0..128 {
            assert_eq!(g.get(x), f.get(x & 7));
        }
    }

    #[test]
    fn rejects_out_of_range_n() {
        assert!(TruthTable::zero(0).is_err());
        assert!(TruthTable::zero(25).is_err());
    }
}
