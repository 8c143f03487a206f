//! Symbolic dynamics substrate: shift spaces over a finite alphabet,
//! admissible words, eventually periodic points and the theta metric.
//!
//! Points are restricted to eventually periodic points. Every quantity the
//! rest of the crate evaluates pointwise is constant on run cylinders or on
//! finite windows, so eventually periodic points (which admit exact finite
//! encodings) are the only representation needed.
//!
//! Symbols are `0..alphabet_size` as `u8`; the metric counts positions
//! 1-based, so two sequences disagreeing in their first symbol are at
//! distance `theta`.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ShiftError {
    #[error("alphabet size must be at least 2, got {0}")]
    AlphabetTooSmall(usize),
    #[error("theta must lie strictly inside (0,1), got {0}")]
    InvalidTheta(f64),
    #[error("transition matrix must be {expected}x{expected}")]
    BadMatrixShape { expected: usize },
    #[error("transition matrix is not aperiodic (no power is strictly positive)")]
    NotAperiodic,
    #[error("word is empty")]
    EmptyWord,
    #[error("symbol {symbol} out of range for alphabet size {alphabet}")]
    SymbolOutOfRange { symbol: u8, alphabet: usize },
    #[error("inadmissible pair {a}{b} under the transition matrix")]
    InadmissiblePair { a: u8, b: u8 },
    #[error("period of an eventually periodic point must be nonempty")]
    EmptyPeriod,
}

/// A full shift or subshift of finite type on `alphabet_size` symbols,
/// with the metric parameter `theta`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftSpace {
    alphabet_size: usize,
    theta: f64,
    /// Row-major d*d adjacency; `None` means the full shift.
    transition: Option<Vec<bool>>,
}

impl ShiftSpace {
    /// Full shift on `d` symbols.
    pub fn full(d: usize, theta: f64) -> Result<Self, ShiftError> {
        if d < 2 {
            return Err(ShiftError::AlphabetTooSmall(d));
        }
        if !(theta > 0.0 && theta < 1.0) {
            return Err(ShiftError::InvalidTheta(theta));
        }
        Ok(ShiftSpace {
            alphabet_size: d,
            theta,
            transition: None,
        })
    }

    /// Subshift of finite type from a 0/1 matrix. The matrix must be
    /// aperiodic: some power strictly positive, checked by boolean
    /// squaring up to exponent `d*d`.
    pub fn subshift(d: usize, theta: f64, rows: &[Vec<u8>]) -> Result<Self, ShiftError> {
        if d < 2 {
            return Err(ShiftError::AlphabetTooSmall(d));
        }
        if !(theta > 0.0 && theta < 1.0) {
            return Err(ShiftError::InvalidTheta(theta));
        }
        if rows.len() != d || rows.iter().any(|r| r.len() != d) {
            return Err(ShiftError::BadMatrixShape { expected: d });
        }
        let flat: Vec<bool> = rows.iter().flatten().map(|&v| v != 0).collect();
        if !is_aperiodic(&flat, d) {
            return Err(ShiftError::NotAperiodic);
        }
        Ok(ShiftSpace {
            alphabet_size: d,
            theta,
            transition: Some(flat),
        })
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn is_full_shift(&self) -> bool {
        self.transition.is_none()
    }

    #[inline]
    pub fn admissible_pair(&self, a: u8, b: u8) -> bool {
        match &self.transition {
            None => true,
            Some(t) => t[a as usize * self.alphabet_size + b as usize],
        }
    }

    fn check_symbol(&self, s: u8) -> Result<(), ShiftError> {
        if (s as usize) < self.alphabet_size {
            Ok(())
        } else {
            Err(ShiftError::SymbolOutOfRange {
                symbol: s,
                alphabet: self.alphabet_size,
            })
        }
    }

    fn check_word(&self, syms: &[u8]) -> Result<(), ShiftError> {
        if syms.is_empty() {
            return Err(ShiftError::EmptyWord);
        }
        for &s in syms {
            self.check_symbol(s)?;
        }
        for pair in syms.windows(2) {
            if !self.admissible_pair(pair[0], pair[1]) {
                return Err(ShiftError::InadmissiblePair {
                    a: pair[0],
                    b: pair[1],
                });
            }
        }
        Ok(())
    }

    /// Number of admissible length-`k` words, via powers of the
    /// transition matrix (u128 counts).
    pub fn word_count(&self, k: usize) -> u128 {
        assert!(k >= 1);
        let d = self.alphabet_size;
        let mut counts = vec![1u128; d];
        for _ in 1..k {
            let mut next = vec![0u128; d];
            for a in 0..d {
                for b in 0..d {
                    if self.admissible_pair(a as u8, b as u8) {
                        next[a] += counts[b];
                    }
                }
            }
            counts = next;
        }
        counts.iter().sum()
    }
}

/// Some boolean power of `m` (up to exponent >= d*d, which covers the
/// Wielandt primitivity bound for 0/1 matrices) is strictly positive.
fn is_aperiodic(m: &[bool], d: usize) -> bool {
    let all_pos = |x: &[bool]| x.iter().all(|&v| v);
    let mul = |x: &[bool], y: &[bool]| -> Vec<bool> {
        let mut out = vec![false; d * d];
        for i in 0..d {
            for k in 0..d {
                if x[i * d + k] {
                    for j in 0..d {
                        if y[k * d + j] {
                            out[i * d + j] = true;
                        }
                    }
                }
            }
        }
        out
    };
    let mut pow = m.to_vec();
    let mut exponent = 1usize;
    loop {
        if all_pos(&pow) {
            return true;
        }
        if exponent >= d * d {
            return false;
        }
        pow = mul(&pow, &pow);
        exponent *= 2;
    }
}

/// A finite admissible word.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(syms: Vec<u8>, space: &ShiftSpace) -> Result<Self, ShiftError> {
        space.check_word(&syms)?;
        Ok(Word(syms))
    }

    pub(crate) fn from_raw(syms: Vec<u8>) -> Self {
        Word(syms)
    }

    pub fn symbols(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::fmt::Display for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &s in &self.0 {
            if s < 10 {
                write!(f, "{s}")?;
            } else {
                write!(f, "[{s}]")?;
            }
        }
        Ok(())
    }
}

/// An eventually periodic point `preperiod . period^infinity` in
/// canonical form: the period is primitive (not a power of a shorter
/// word) and the preperiod is minimal (its last symbol cannot be
/// absorbed into one more rotation of the period).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EPPoint {
    preperiod: Vec<u8>,
    period: Vec<u8>,
}

impl EPPoint {
    pub fn new(preperiod: Vec<u8>, period: Vec<u8>, space: &ShiftSpace) -> Result<Self, ShiftError> {
        if period.is_empty() {
            return Err(ShiftError::EmptyPeriod);
        }
        // Admissibility of preperiod . period . period covers every
        // adjacent pair including the wrap inside the periodic tail.
        let mut probe = preperiod.clone();
        probe.extend_from_slice(&period);
        probe.extend_from_slice(&period);
        space.check_word(&probe)?;
        Ok(Self::canonical(preperiod, period))
    }

    /// Purely periodic point `w^infinity`.
    pub fn periodic(period: Vec<u8>, space: &ShiftSpace) -> Result<Self, ShiftError> {
        Self::new(Vec::new(), period, space)
    }

    /// Fixed point `s^infinity`.
    pub fn fixed(symbol: u8, space: &ShiftSpace) -> Result<Self, ShiftError> {
        Self::new(Vec::new(), vec![symbol], space)
    }

    pub(crate) fn canonical(mut preperiod: Vec<u8>, mut period: Vec<u8>) -> Self {
        // Reduce the period to its primitive root.
        'outer: loop {
            let n = period.len();
            for dl in 1..n {
                if n % dl == 0 && period.chunks(dl).all(|c| c == &period[..dl]) {
                    period.truncate(dl);
                    continue 'outer;
                }
            }
            break;
        }
        // Absorb preperiod symbols that equal the last period symbol by
        // rotating the period backwards.
        while let Some(&last) = preperiod.last() {
            if last == *period.last().expect("nonempty period") {
                preperiod.pop();
                period.rotate_right(1);
            } else {
                break;
            }
        }
        EPPoint { preperiod, period }
    }

    pub fn preperiod(&self) -> &[u8] {
        &self.preperiod
    }

    pub fn period(&self) -> &[u8] {
        &self.period
    }

    /// Symbol at 0-based position `i`.
    #[inline]
    pub fn symbol_at(&self, i: usize) -> u8 {
        if i < self.preperiod.len() {
            self.preperiod[i]
        } else {
            self.period[(i - self.preperiod.len()) % self.period.len()]
        }
    }

    /// The depth-`k` window starting at position `offset`.
    pub fn window(&self, offset: usize, k: usize) -> Vec<u8> {
        (offset..offset + k).map(|i| self.symbol_at(i)).collect()
    }

    pub fn is_fixed(&self) -> bool {
        self.preperiod.is_empty() && self.period.len() == 1
    }
}

impl std::fmt::Display for EPPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &s in &self.preperiod {
            write!(f, "{s}")?;
        }
        write!(f, "(")?;
        for &s in &self.period {
            write!(f, "{s}")?;
        }
        write!(f, ")")
    }
}

/// The shift map on eventually periodic points; the result is canonical.
pub fn shift(p: &EPPoint) -> EPPoint {
    if p.preperiod.is_empty() {
        let mut per = p.period.clone();
        per.rotate_left(1);
        EPPoint::canonical(Vec::new(), per)
    } else {
        EPPoint::canonical(p.preperiod[1..].to_vec(), p.period.clone())
    }
}

/// All one-symbol extensions `a . p` admissible in `s`, ordered by symbol.
pub fn preimages(p: &EPPoint, s: &ShiftSpace) -> Vec<EPPoint> {
    let first = p.symbol_at(0);
    (0..s.alphabet_size() as u8)
        .filter(|&a| s.admissible_pair(a, first))
        .map(|a| {
            let mut pre = Vec::with_capacity(p.preperiod.len() + 1);
            pre.push(a);
            pre.extend_from_slice(&p.preperiod);
            EPPoint::canonical(pre, p.period.clone())
        })
        .collect()
}

/// All admissible words of length `k`, in lexicographic order. This is
/// the stable state indexing used by every depth-`k` structure.
pub fn enumerate_words(s: &ShiftSpace, k: usize) -> Vec<Word> {
    assert!(k >= 1, "word length must be at least 1");
    let d = s.alphabet_size() as u8;
    let mut out = Vec::new();
    let mut buf = Vec::with_capacity(k);
    fn rec(s: &ShiftSpace, d: u8, k: usize, buf: &mut Vec<u8>, out: &mut Vec<Word>) {
        if buf.len() == k {
            out.push(Word::from_raw(buf.clone()));
            return;
        }
        for a in 0..d {
            if buf.is_empty() || s.admissible_pair(*buf.last().unwrap(), a) {
                buf.push(a);
                rec(s, d, k, buf, out);
                buf.pop();
            }
        }
    }
    rec(s, d, k, &mut buf, &mut out);
    out
}

/// The metric `theta^i` with `i` the 1-based index of the first
/// disagreement; 0 for canonically equal points.
pub fn metric(p: &EPPoint, q: &EPPoint, s: &ShiftSpace) -> f64 {
    if p == q {
        return 0.0;
    }
    let bound = p.preperiod.len().max(q.preperiod.len()) + lcm(p.period.len(), q.period.len());
    for i in 0..bound {
        if p.symbol_at(i) != q.symbol_at(i) {
            return s.theta().powi(i as i32 + 1);
        }
    }
    // Identical sequences have identical canonical forms, so this is
    // unreachable for canonical inputs.
    0.0
}

/// First-disagreement metric on two finite words of equal length;
/// `None` if they agree on their whole common length.
pub fn word_metric(a: &Word, b: &Word, theta: f64) -> Option<f64> {
    for (i, (x, y)) in a.symbols().iter().zip(b.symbols()).enumerate() {
        if x != y {
            return Some(theta.powi(i as i32 + 1));
        }
    }
    None
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Depth-`k` de Bruijn state graph shared by the transfer and tropical
/// machinery. An edge `src -> tgt` exists when `tgt` is `src` shifted
/// left by one with an admissible symbol appended; the in-edges of each
/// state are ordered by the incoming branch symbol.
#[derive(Clone, Debug)]
pub(crate) struct StateGraph {
    pub words: Vec<Word>,
    /// `in_edges[t]` lists `(src_index, branch_symbol)` with
    /// `words[src] = branch . words[t][..k-1]`.
    pub in_edges: Vec<Vec<(u32, u8)>>,
    /// `out_edges[s]` lists target indices (derived from `in_edges`).
    pub out_edges: Vec<Vec<u32>>,
    pub depth: usize,
}

impl StateGraph {
    pub fn build(space: &ShiftSpace, k: usize) -> StateGraph {
        let words = enumerate_words(space, k);
        let index = |syms: &[u8]| -> u32 {
            words
                .binary_search_by(|w| w.symbols().cmp(syms))
                .expect("admissible word missing from enumeration") as u32
        };
        let mut in_edges = vec![Vec::new(); words.len()];
        let mut out_edges = vec![Vec::new(); words.len()];
        let mut buf = vec![0u8; k];
        for (t, w) in words.iter().enumerate() {
            let syms = w.symbols();
            for a in 0..space.alphabet_size() as u8 {
                if space.admissible_pair(a, syms[0]) {
                    buf[0] = a;
                    buf[1..k].copy_from_slice(&syms[..k - 1]);
                    let src = index(&buf);
                    in_edges[t].push((src, a));
                    out_edges[src as usize].push(t as u32);
                }
            }
        }
        for outs in &mut out_edges {
            outs.sort_unstable();
        }
        StateGraph {
            words,
            in_edges,
            out_edges,
            depth: k,
        }
    }

    pub fn state_index(&self, syms: &[u8]) -> Option<usize> {
        self.words.binary_search_by(|w| w.symbols().cmp(syms)).ok()
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    /// The (k+1)-symbol word of an edge into `t` from branch symbol `a`:
    /// `a . words[t]`.
    pub fn edge_word(&self, t: usize, a: u8, buf: &mut Vec<u8>) {
        buf.clear();
        buf.push(a);
        buf.extend_from_slice(self.words[t].symbols());
    }
}
