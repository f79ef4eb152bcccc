//! Shift spaces, cylinders, Birkhoff sums, and locally constant potentials.
//!
//! Everything here is immutable after construction and pure, so values can be
//! shared freely across threads.

use crate::error::{Error, Result};
use crate::numerics::spectral_radius;

/// A one- or two-sided subshift of finite type on `{0, .., N-1}` described by
/// a 0/1 transition matrix. The matrix must be primitive (some power strictly
/// positive), which is checked at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftSpace {
    alphabet: usize,
    /// Row-major `alphabet x alphabet`; `transition[i][j]` allows symbol `j`
    /// to follow symbol `i`.
    transition: Vec<bool>,
    /// When set, constant-potential pressure is computed as `h + c` with this
    /// topological entropy instead of `log rho(A)`. Used by the Anosov-base
    /// proxy where the base entropy is known but no symbolic partition of the
    /// torus is constructed.
    entropy_override: Option<f64>,
}

impl ShiftSpace {
    /// Full shift on `n` symbols.
    pub fn full(n: usize) -> Self {
        ShiftSpace {
            alphabet: n,
            transition: vec![true; n * n],
            entropy_override: None,
        }
    }

    /// Subshift from explicit 0/1 rows.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParameters(
                "transition matrix must be square and nonempty".into(),
            ));
        }
        let transition: Vec<bool> = rows.iter().flatten().map(|&v| v != 0).collect();
        let shift = ShiftSpace {
            alphabet: n,
            transition,
            entropy_override: None,
        };
        shift.validate()?;
        Ok(shift)
    }

    pub fn with_entropy_override(mut self, h: f64) -> Self {
        self.entropy_override = Some(h);
        self
    }

    pub fn entropy_override(&self) -> Option<f64> {
        self.entropy_override
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn allows(&self, from: u8, to: u8) -> bool {
        self.transition[from as usize * self.alphabet + to as usize]
    }

    fn validate(&self) -> Result<()> {
        let n = self.alphabet;
        for i in 0..n {
            if (0..n).all(|j| !self.transition[i * n + j]) {
                return Err(Error::InvalidParameters(format!(
                    "transition row {i} is all zero (dead symbol)"
                )));
            }
            if (0..n).all(|j| !self.transition[j * n + i]) {
                return Err(Error::InvalidParameters(format!(
                    "transition column {i} is all zero (unreachable symbol)"
                )));
            }
        }
        if !self.is_primitive() {
            return Err(Error::InvalidParameters(
                "transition matrix is not primitive (mixing assumption fails)".into(),
            ));
        }
        Ok(())
    }

    /// Primitivity check: some power of the boolean matrix is strictly
    /// positive. (n-1)^2 + 1 is the Wielandt bound on the required power.
    fn is_primitive(&self) -> bool {
        let n = self.alphabet;
        let mut pow: Vec<bool> = self.transition.clone();
        let bound = (n.saturating_sub(1)).pow(2) + 1;
        for _ in 0..bound {
            if pow.iter().all(|&b| b) {
                return true;
            }
            let mut next = vec![false; n * n];
            for i in 0..n {
                for k in 0..n {
                    if pow[i * n + k] {
                        for j in 0..n {
                            if self.transition[k * n + j] {
                                next[i * n + j] = true;
                            }
                        }
                    }
                }
            }
            if next == pow {
                break;
            }
            pow = next;
        }
        pow.iter().all(|&b| b)
    }

    /// Is the finite word admissible (every consecutive pair allowed)?
    pub fn is_admissible(&self, word: &Word) -> bool {
        word.symbols()
            .windows(2)
            .all(|p| self.allows(p[0], p[1]))
            && word.symbols().iter().all(|&s| (s as usize) < self.alphabet)
    }

    /// Number of admissible words of length `n`: 1^T A^{n-1} 1.
    pub fn word_count(&self, n: usize) -> u128 {
        if n == 0 {
            return 1;
        }
        let na = self.alphabet;
        let mut counts = vec![1u128; na];
        for _ in 1..n {
            let mut next = vec![0u128; na];
            for i in 0..na {
                for j in 0..na {
                    if self.transition[i * na + j] {
                        next[i] = next[i].saturating_add(counts[j]);
                    }
                }
            }
            counts = next;
        }
        counts.iter().fold(0u128, |a, &b| a.saturating_add(b))
    }

    /// log of the spectral radius of the 0/1 transition matrix.
    pub fn log_spectral_radius(&self) -> f64 {
        let m: Vec<f64> = self
            .transition
            .iter()
            .map(|&b| if b { 1.0 } else { 0.0 })
            .collect();
        spectral_radius(&m, self.alphabet).0.ln()
    }

    /// Streaming enumeration of all admissible words of length `n` in
    /// lexicographic order. Nothing is materialized.
    pub fn cylinder_words(&self, n: usize) -> CylinderWords<'_> {
        assert!(n >= 1, "cylinder_words requires n >= 1");
        CylinderWords {
            shift: self,
            length: n,
            stack: vec![0u8],
            started: false,
            done: false,
        }
    }
}

/// A finite word over the shift alphabet, stored as packed bytes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(symbols: Vec<u8>) -> Self {
        Word(symbols)
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
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Lexicographic depth-first enumeration of admissible words.
pub struct CylinderWords<'a> {
    shift: &'a ShiftSpace,
    length: usize,
    stack: Vec<u8>,
    started: bool,
    done: bool,
}

impl<'a> CylinderWords<'a> {
    /// Advance the stack to the next admissible prefix, returning false when
    /// the enumeration is exhausted.
    fn advance(&mut self) -> bool {
        let n_sym = self.shift.alphabet as u8;
        // Deepen while possible.
        while self.stack.len() < self.length {
            let last = *self.stack.last().unwrap();
            let mut placed = false;
            for s in 0..n_sym {
                if self.shift.allows(last, s) {
                    self.stack.push(s);
                    placed = true;
                    break;
                }
            }
            if !placed {
                // Dead prefix (cannot happen for validated shifts).
                if !self.backtrack() {
                    return false;
                }
            }
        }
        true
    }

    /// Increment the deepest position that can still grow; pop otherwise.
    fn backtrack(&mut self) -> bool {
        let n_sym = self.shift.alphabet as u8;
        while let Some(top) = self.stack.pop() {
            let ok_prev = |s: u8, stack: &[u8]| -> bool {
                match stack.last() {
                    Some(&p) => self.shift.allows(p, s),
                    None => true,
                }
            };
            for s in (top + 1)..n_sym {
                if ok_prev(s, &self.stack) {
                    self.stack.push(s);
                    return true;
                }
            }
        }
        false
    }
}

impl<'a> Iterator for CylinderWords<'a> {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            if !self.advance() {
                self.done = true;
                return None;
            }
        } else {
            if !self.backtrack() || !self.advance() {
                self.done = true;
                return None;
            }
        }
        Some(Word(self.stack.clone()))
    }
}

/// A one-sided sequence that is eventually periodic: `head` followed by
/// `cycle` repeated forever. Periodic completions have an empty head.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicSeq {
    head: Vec<u8>,
    cycle: Vec<u8>,
}

impl PeriodicSeq {
    pub fn new(head: Vec<u8>, cycle: Vec<u8>) -> Self {
        assert!(!cycle.is_empty(), "cycle must be nonempty");
        PeriodicSeq { head, cycle }
    }

    pub fn periodic(cycle: Vec<u8>) -> Self {
        Self::new(Vec::new(), cycle)
    }

    pub fn symbol(&self, i: usize) -> u8 {
        if i < self.head.len() {
            self.head[i]
        } else {
            self.cycle[(i - self.head.len()) % self.cycle.len()]
        }
    }

    pub fn head(&self) -> &[u8] {
        &self.head
    }

    pub fn cycle(&self) -> &[u8] {
        &self.cycle
    }

    /// New sequence with `prefix` symbols prepended.
    pub fn prepend(&self, prefix: &[u8]) -> PeriodicSeq {
        let mut head = prefix.to_vec();
        head.extend_from_slice(&self.head);
        PeriodicSeq {
            head,
            cycle: self.cycle.clone(),
        }
    }

    /// Drop the first symbol (the shift map).
    pub fn shifted(&self) -> PeriodicSeq {
        if self.head.is_empty() {
            let mut cycle = self.cycle.clone();
            cycle.rotate_left(1);
            PeriodicSeq {
                head: Vec::new(),
                cycle,
            }
        } else {
            PeriodicSeq {
                head: self.head[1..].to_vec(),
                cycle: self.cycle.clone(),
            }
        }
    }
}

/// Periodic completion of a finite word: the sequence repeating `w` when the
/// closing transition (last symbol -> first symbol) is admissible. Otherwise
/// the lexicographically least admissible connecting word `u` (shortest
/// first) is inserted and `(w u)` is repeated.
pub fn periodic_completion(shift: &ShiftSpace, w: &Word) -> Result<PeriodicSeq> {
    if w.is_empty() {
        return Err(Error::InvalidParameters(
            "cannot complete the empty word".into(),
        ));
    }
    let first = w.symbols()[0];
    let last = *w.symbols().last().unwrap();
    if shift.allows(last, first) {
        return Ok(PeriodicSeq::periodic(w.symbols().to_vec()));
    }
    // Breadth-first search over connecting words, shortest first and
    // lexicographic within each length, so the first hit is the least one.
    let n = shift.alphabet as u8;
    let max_len = shift.alphabet * shift.alphabet + 2;
    let mut frontier: Vec<Vec<u8>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next_frontier = Vec::new();
        for u in &frontier {
            let tail = *u.last().unwrap_or(&last);
            for s in 0..n {
                if shift.allows(tail, s) {
                    let mut cand = u.clone();
                    cand.push(s);
                    if shift.allows(s, first) {
                        let mut cycle = w.symbols().to_vec();
                        cycle.extend_from_slice(&cand);
                        return Ok(PeriodicSeq::periodic(cycle));
                    }
                    next_frontier.push(cand);
                }
            }
        }
        frontier = next_frontier;
    }
    Err(Error::NonClosableWord(w.to_string()))
}

/// A real potential on the one-sided shift depending only on the first
/// `depth` symbols. Depth 0 is a constant. Values are stored densely over all
/// `N^depth` windows; inadmissible windows are simply never read.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    alphabet: usize,
    depth: usize,
    values: Vec<f64>,
}

impl Potential {
    pub fn constant(alphabet: usize, value: f64) -> Self {
        Potential {
            alphabet,
            depth: 0,
            values: vec![value],
        }
    }

    /// Depth-1 potential from per-symbol values.
    pub fn depth1(values: Vec<f64>) -> Self {
        Potential {
            alphabet: values.len(),
            depth: 1,
            values,
        }
    }

    /// General finite-depth potential; `values[idx]` where `idx` encodes the
    /// window base-N, first symbol most significant.
    pub fn from_values(alphabet: usize, depth: usize, values: Vec<f64>) -> Result<Self> {
        let expect = alphabet.pow(depth as u32);
        if values.len() != expect {
            return Err(Error::InvalidParameters(format!(
                "potential of depth {depth} on {alphabet} symbols needs {expect} values, got {}",
                values.len()
            )));
        }
        Ok(Potential {
            alphabet,
            depth,
            values,
        })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn is_strictly_negative(&self) -> bool {
        self.max_value() < 0.0
    }

    /// Value spread, the diameter of the value set.
    pub fn spread(&self) -> f64 {
        self.max_value() - self.min_value()
    }

    /// Evaluate at position `pos` of a sequence.
    pub fn eval_at(&self, seq: &PeriodicSeq, pos: usize) -> f64 {
        if self.depth == 0 {
            return self.values[0];
        }
        let mut idx = 0usize;
        for i in 0..self.depth {
            idx = idx * self.alphabet + seq.symbol(pos + i) as usize;
        }
        self.values[idx]
    }

    /// Evaluate on an explicit window of at least `depth` symbols.
    pub fn eval_window(&self, window: &[u8]) -> f64 {
        if self.depth == 0 {
            return self.values[0];
        }
        debug_assert!(window.len() >= self.depth);
        let mut idx = 0usize;
        for &s in &window[..self.depth] {
            idx = idx * self.alphabet + s as usize;
        }
        self.values[idx]
    }

    /// Pointwise combination `self + scale * other`, defined on windows of
    /// the larger depth.
    pub fn affine_combine(&self, other: &Potential, scale: f64) -> Potential {
        assert_eq!(self.alphabet, other.alphabet);
        let depth = self.depth.max(other.depth);
        let n = self.alphabet;
        let total = n.pow(depth as u32);
        let mut values = vec![0.0; total];
        let mut window = vec![0u8; depth.max(1)];
        for (idx, v) in values.iter_mut().enumerate() {
            let mut rem = idx;
            for i in (0..depth).rev() {
                window[i] = (rem % n) as u8;
                rem /= n;
            }
            *v = self.eval_window(&window[..]) + scale * other.eval_window(&window[..]);
        }
        Potential {
            alphabet: n,
            depth,
            values,
        }
    }

    /// Scalar multiple `c * self`.
    pub fn scaled(&self, c: f64) -> Potential {
        Potential {
            alphabet: self.alphabet,
            depth: self.depth,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }
}

/// The n-th Birkhoff sum of `psi` along `seq`: psi(seq) + psi(shift seq) +
/// ... + psi(shift^{n-1} seq). Exact for finite-depth potentials.
pub fn birkhoff_sum(psi: &Potential, seq: &PeriodicSeq, n: usize) -> f64 {
    let mut acc = 0.0;
    for m in 0..n {
        acc += psi.eval_at(seq, m);
    }
    acc
}

/// Birkhoff sum at the periodic completion of a finite word.
pub fn birkhoff_sum_word(shift: &ShiftSpace, psi: &Potential, w: &Word, n: usize) -> Result<f64> {
    let seq = periodic_completion(shift, w)?;
    Ok(birkhoff_sum(psi, &seq, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn example_subshift() -> ShiftSpace {
        // The 3-symbol mixing subshift used by the step-system fixture.
        ShiftSpace::from_rows(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 1, 1]]).unwrap()
    }

    #[test]
    fn full_shift_words_of_length_one() {
        let shift = ShiftSpace::full(2);
        let words: Vec<String> = shift.cylinder_words(1).map(|w| w.to_string()).collect();
        assert_eq!(words, vec!["0", "1"]);
    }

    #[test]
    fn full_shift_words_are_lexicographic() {
        let shift = ShiftSpace::full(2);
        let words: Vec<String> = shift.cylinder_words(3).map(|w| w.to_string()).collect();
        assert_eq!(
            words,
            vec!["000", "001", "010", "011", "100", "101", "110", "111"]
        );
    }

    #[test]
    fn subshift_pairs_match_matrix() {
        let shift = example_subshift();
        let words: Vec<String> = shift.cylinder_words(2).map(|w| w.to_string()).collect();
        assert_eq!(words, vec!["00", "01", "11", "12", "20", "21", "22"]);
    }

    #[test]
    fn word_counts_match_matrix_power_oracle() {
        for shift in [ShiftSpace::full(2), ShiftSpace::full(3), example_subshift()] {
            for n in 1..=8 {
                let enumerated = shift.cylinder_words(n).count() as u128;
                assert_eq!(enumerated, shift.word_count(n), "n = {n}");
            }
        }
    }

    #[test]
    fn periodic_completion_repeats_the_word() {
        let shift = ShiftSpace::full(2);
        let seq = periodic_completion(&shift, &Word::new(vec![0, 1])).unwrap();
        assert_eq!(seq.cycle(), &[0, 1]);
        assert_eq!(
            (0..6).map(|i| seq.symbol(i)).collect::<Vec<_>>(),
            vec![0, 1, 0, 1, 0, 1]
        );
        let fixed = periodic_completion(&shift, &Word::new(vec![0])).unwrap();
        assert_eq!(fixed.cycle(), &[0]);
    }

    #[test]
    fn completion_closure_on_subshift() {
        // On the fixture matrix the closure 2 -> 0 is admissible, so the
        // word 02 is repeated as is (only the closing transition is checked).
        let shift = example_subshift();
        let seq = periodic_completion(&shift, &Word::new(vec![0, 2])).unwrap();
        assert_eq!(seq.cycle(), &[0, 2]);
        // 1 -> 0 is forbidden, so completing 01 must insert a connector;
        // the least admissible continuation from 1 that can return to 0 is 2.
        let seq = periodic_completion(&shift, &Word::new(vec![0, 1])).unwrap();
        assert_eq!(seq.cycle(), &[0, 1, 2]);
        assert!(shift.allows(1, 2) && shift.allows(2, 0));
    }

    #[test]
    fn completion_period_divides_length_when_closable() {
        let shift = ShiftSpace::full(3);
        for w in shift.cylinder_words(4) {
            let seq = periodic_completion(&shift, &w).unwrap();
            assert_eq!(seq.cycle().len(), w.len());
            // Minimal period of the repeated sequence divides the length.
            let c = seq.cycle();
            let min_period = (1..=c.len())
                .find(|&p| (0..c.len()).all(|i| c[i] == c[(i + p) % c.len()]))
                .unwrap();
            assert_eq!(w.len() % min_period, 0);
        }
    }

    #[test]
    fn birkhoff_constant_potential() {
        let shift = ShiftSpace::full(2);
        let psi = Potential::constant(2, -(4.0f64.ln()));
        let w = Word::new(vec![0, 1, 1, 0, 1]);
        let s = birkhoff_sum_word(&shift, &psi, &w, 5).unwrap();
        assert!((s - (-5.0 * 4.0f64.ln())).abs() < 1e-12);
        assert!((s + 6.931472).abs() < 1e-6);
    }

    #[test]
    fn birkhoff_depth1_potential() {
        let shift = ShiftSpace::full(2);
        let psi = Potential::depth1(vec![-(1.2f64.ln()), -(1.8f64.ln())]);
        let w = Word::new(vec![0, 1, 1, 0, 1]);
        let s = birkhoff_sum_word(&shift, &psi, &w, 5).unwrap();
        let expect = -(2.0 * 1.2f64.ln() + 3.0 * 1.8f64.ln());
        assert!((s - expect).abs() < 1e-12);
        assert!((s + 2.128003).abs() < 1e-6);
    }

    #[test]
    fn birkhoff_zero_potential() {
        let shift = ShiftSpace::full(2);
        let psi = Potential::constant(2, 0.0);
        let w = Word::new(vec![1, 0, 1]);
        assert_eq!(birkhoff_sum_word(&shift, &psi, &w, 7).unwrap(), 0.0);
    }

    #[test]
    fn birkhoff_additivity_exhaustive() {
        // S_{n+m}(seq) = S_n(seq) + S_m(shift^n seq) for depth-k psi, n >= k.
        for alphabet in [2usize, 3] {
            let shift = ShiftSpace::full(alphabet);
            let vals: Vec<f64> = (0..alphabet.pow(2))
                .map(|i| -((i + 2) as f64).ln())
                .collect();
            let psi = Potential::from_values(alphabet, 2, vals).unwrap();
            for len in 2..=5usize {
                for w in shift.cylinder_words(len) {
                    let seq = periodic_completion(&shift, &w).unwrap();
                    for n in 2..=6usize {
                        for m in 1..=4usize {
                            let lhs = birkhoff_sum(&psi, &seq, n + m);
                            let mut shifted = seq.clone();
                            for _ in 0..n {
                                shifted = shifted.shifted();
                            }
                            let rhs = birkhoff_sum(&psi, &seq, n) + birkhoff_sum(&psi, &shifted, m);
                            assert!((lhs - rhs).abs() < 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_dead_symbols_and_non_primitive() {
        assert!(ShiftSpace::from_rows(&[vec![1, 0], vec![1, 0]]).is_err());
        // Permutation matrix: irreducible but not primitive.
        assert!(ShiftSpace::from_rows(&[vec![0, 1], vec![1, 0]]).is_err());
    }

    proptest! {
        #[test]
        fn completion_always_admissible(word in proptest::collection::vec(0u8..3, 1..7)) {
            let shift = example_subshift();
            let w = Word::new(word);
            if let Ok(seq) = periodic_completion(&shift, &w) {
                // The cycle must close admissibly.
                let c = seq.cycle();
                let closes = shift.allows(*c.last().unwrap(), c[0]);
                prop_assert!(closes);
            }
        }
    }
}
