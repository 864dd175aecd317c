//! Bell sampling on two copies and marginal estimates from the outcomes.
//!
//! Outcome y = (v, w) names the Bell state (P_y ⊗ I)|Phi+> on each pair
//! (qubit i, qubit i + n). Per pair the digit 2v + w is 0 = Phi+ (I),
//! 1 = Phi- (Z), 2 = Psi+ (X), 3 = Psi- (Y), matching Pauli digits.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::num::NonZeroUsize;

use lru::LruCache;
use parking_lot::Mutex;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::distribution::{bell_outcome_distribution, MAX_DISTRIBUTION_QUBITS};
use crate::error::{guard, invalid, Error, Result};
use crate::factory::PauliNoiseChannel;
use crate::marginals::{BitMarginals, PauliMarginals};
use crate::ordering::QubitOrdering;
use crate::pauli::PauliString;
use crate::state::PureState;

/// M[a][b]: eigenvalue of P_a ⊗ P_a on Bell state b. Rows and columns in digit order I, Z, X, Y.
pub const M_TABLE: [[i8; 4]; 4] = [[1, 1, 1, 1], [1, 1, -1, -1], [1, -1, 1, -1], [-1, 1, 1, -1]];

/// s[b]: SWAP eigenvalue on Bell state b.
pub const S_VECTOR: [i8; 4] = [1, 1, 1, -1];

pub fn eigenvalue_tables() -> ([[i8; 4]; 4], [i8; 4]) {
    (M_TABLE, S_VECTOR)
}

/// Default number of cached prefix estimates.
pub const DEFAULT_CACHE: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BellDataset {
    n: usize,
    outcomes: Vec<PauliString>,
    seed: u64,
    recipe_hash: String,
}

impl BellDataset {
    pub fn new(n: usize, outcomes: Vec<PauliString>, seed: u64, recipe_hash: impl Into<String>) -> Result<Self> {
        if outcomes.is_empty() {
            return invalid("a dataset needs at least one outcome");
        }
        if let Some(o) = outcomes.iter().find(|o| o.num_qubits() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: o.num_qubits() });
        }
        Ok(Self { n, outcomes, seed, recipe_hash: recipe_hash.into() })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn outcomes(&self) -> &[PauliString] {
        &self.outcomes
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn recipe_hash(&self) -> &str {
        &self.recipe_hash
    }

    pub fn set_provenance(&mut self, seed: u64, recipe_hash: impl Into<String>) {
        self.seed = seed;
        self.recipe_hash = recipe_hash.into();
    }

    /// Empirical outcome frequencies indexed like `PauliDistribution`.
    pub fn frequencies(&self) -> Vec<f64> {
        let mut f = vec![0.0; 1usize << (2 * self.n)];
        let w = 1.0 / self.len() as f64;
        for o in &self.outcomes {
            f[o.index()] += w;
        }
        f
    }

    /// Text format:
    /// ```text
    /// #bell-dataset=1
    /// n=<n>,N=<N>,seed=<seed>,recipe=<hash>
    /// <2n bits (v1 w1 ... vn wn)>    one line per outcome
    /// ```
    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "#bell-dataset=1")?;
        writeln!(w, "n={},N={},seed={},recipe={}", self.n, self.len(), self.seed, self.recipe_hash)?;
        for o in &self.outcomes {
            writeln!(w, "{}", o.bit_string())?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii")
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let mut next =
            || -> Result<Option<String>> { lines.next().transpose().map_err(|e| Error::Parse(e.to_string())) };
        match next()? {
            Some(l) if l.trim() == "#bell-dataset=1" => {}
            Some(l) => return Err(Error::Parse(format!("unsupported dataset header {l:?}"))),
            None => return Err(Error::Parse("empty dataset file".into())),
        }
        let header = next()?.ok_or_else(|| Error::Parse("missing dataset header".into()))?;
        let mut fields = BTreeMap::new();
        for kv in header.trim().split(',') {
            let (k, v) = kv.split_once('=').ok_or_else(|| Error::Parse(format!("bad header field {kv:?}")))?;
            fields.insert(k.to_string(), v.to_string());
        }
        let get = |k: &str| fields.get(k).cloned().ok_or_else(|| Error::Parse(format!("header lacks {k}")));
        let num = |k: &str| -> Result<u64> { get(k)?.parse().map_err(|e| Error::Parse(format!("{k}: {e}"))) };
        let n = num("n")? as usize;
        let count = num("N")? as usize;
        let seed = num("seed")?;
        let recipe = get("recipe")?;
        let mut outcomes = Vec::with_capacity(count);
        while let Some(l) = next()? {
            let l = l.trim();
            if l.is_empty() {
                continue;
            }
            if l.len() != 2 * n || !l.bytes().all(|b| b == b'0' || b == b'1') {
                return Err(Error::Parse(format!("row {} is not a {}-bit string", outcomes.len() + 1, 2 * n)));
            }
            outcomes.push(l.parse::<PauliString>()?);
        }
        if outcomes.len() != count {
            return Err(Error::Parse(format!("header says N={count}, found {} rows", outcomes.len())));
        }
        Self::new(n, outcomes, seed, recipe)
    }
}

/// Sampler over the 4^n Bell outcomes of phi1 ⊗ phi2.
pub struct BellOutcomeSampler {
    n: usize,
    dist: WeightedIndex<f64>,
}

impl BellOutcomeSampler {
    pub fn new(phi1: &PureState, phi2: &PureState) -> Result<Self> {
        guard(phi1.num_qubits(), MAX_DISTRIBUTION_QUBITS)?;
        let probs = bell_outcome_distribution(phi1, phi2)?;
        let dist = WeightedIndex::new(&probs).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Ok(Self { n: phi1.num_qubits(), dist })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PauliString {
        PauliString::from_index(self.n, self.dist.sample(rng))
    }
}

/// N Bell-basis measurements of psi ⊗ psi.
///
/// Each draw is exact from |<P_y|psi ⊗ psi>|^2; the outcome table is built
/// once by Walsh-Hadamard transforms and sampled by inverse CDF.
pub fn bell_sample<R: Rng + ?Sized>(state: &PureState, count: usize, rng: &mut R) -> Result<BellDataset> {
    let sampler = BellOutcomeSampler::new(state, state)?;
    let outcomes = (0..count).map(|_| sampler.sample(rng)).collect();
    BellDataset::new(state.num_qubits(), outcomes, 0, "")
}

/// N Bell measurements of Lambda(sigma) ⊗ Lambda(sigma); each copy gets an
/// independent error draw. Draws with the same error pair share one outcome table.
pub fn bell_sample_noisy<R: Rng + ?Sized>(
    sigma: &PureState,
    channel: &PauliNoiseChannel,
    count: usize,
    rng: &mut R,
) -> Result<BellDataset> {
    let n = sigma.num_qubits();
    if channel.num_qubits() != n {
        return Err(Error::DimensionMismatch { expected: n, got: channel.num_qubits() });
    }
    let errs: Vec<(Option<PauliString>, Option<PauliString>)> =
        (0..count).map(|_| (channel.sample_error(rng), channel.sample_error(rng))).collect();
    let mut samplers: BTreeMap<(Option<PauliString>, Option<PauliString>), BellOutcomeSampler> = BTreeMap::new();
    let mut outcomes = Vec::with_capacity(count);
    for key in errs {
        if let std::collections::btree_map::Entry::Vacant(e) = samplers.entry(key) {
            let copy = |e: &Option<PauliString>| -> Result<PureState> {
                let mut s = sigma.clone();
                if let Some(p) = e {
                    s.apply_pauli(p)?;
                }
                Ok(s)
            };
            e.insert(BellOutcomeSampler::new(&copy(&key.0)?, &copy(&key.1)?)?);
        }
        outcomes.push(samplers[&key].sample(rng));
    }
    BellDataset::new(n, outcomes, 0, "")
}

/// Marginal estimates of p_rho from one Bell dataset, in a fixed ordering.
///
/// Outcomes are compressed to distinct values with counts; per outcome the
/// digits are stored in ordering order together with suffix products of s.
pub struct MarginalEstimator {
    n: usize,
    total: f64,
    ordering: QubitOrdering,
    /// digits[i * n + k]: digit of distinct outcome i at ordering position k.
    digits: Vec<u8>,
    /// suffix[i * (n + 1) + k] = prod_{l >= k} s[digit_l].
    suffix: Vec<i8>,
    counts: Vec<f64>,
    purity: f64,
    cache: Option<Mutex<LruCache<(usize, u64), f64>>>,
}

impl MarginalEstimator {
    pub fn new(dataset: &BellDataset, ordering: QubitOrdering) -> Result<Self> {
        Self::with_cache(dataset, ordering, DEFAULT_CACHE)
    }

    /// `cache_size = 0` disables the prefix cache.
    pub fn with_cache(dataset: &BellDataset, ordering: QubitOrdering, cache_size: usize) -> Result<Self> {
        let n = dataset.num_qubits();
        if ordering.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: ordering.len() });
        }
        let mut tally: BTreeMap<PauliString, usize> = BTreeMap::new();
        for o in dataset.outcomes() {
            *tally.entry(*o).or_default() += 1;
        }
        let mut digits = Vec::with_capacity(tally.len() * n);
        let mut suffix = Vec::with_capacity(tally.len() * (n + 1));
        let mut counts = Vec::with_capacity(tally.len());
        for (o, c) in &tally {
            let ds: Vec<u8> = ordering.as_slice().iter().map(|&q| o.digit(q)).collect();
            let mut suf = vec![1i8; n + 1];
            for k in (0..n).rev() {
                suf[k] = suf[k + 1] * S_VECTOR[ds[k] as usize];
            }
            digits.extend(ds);
            suffix.extend(suf);
            counts.push(*c as f64);
        }
        let mut est = Self {
            n,
            total: dataset.len() as f64,
            ordering,
            digits,
            suffix,
            counts,
            purity: 0.0,
            cache: NonZeroUsize::new(cache_size).map(|c| Mutex::new(LruCache::new(c))),
        };
        est.purity = est.q_hat_raw(&[]);
        Ok(est)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dataset_size(&self) -> usize {
        self.total as usize
    }

    pub fn distinct_outcomes(&self) -> usize {
        self.counts.len()
    }

    /// Q0 hat: the purity estimate.
    pub fn purity(&self) -> f64 {
        self.purity
    }

    fn q_hat_raw(&self, prefix_digits: &[u8]) -> f64 {
        let (n, k) = (self.n, prefix_digits.len());
        let mut acc = 0.0;
        for (i, c) in self.counts.iter().enumerate() {
            let ds = &self.digits[i * n..i * n + k];
            let mut sign = self.suffix[i * (n + 1) + k];
            for (x, y) in prefix_digits.iter().zip(ds) {
                sign *= M_TABLE[*x as usize][*y as usize];
            }
            acc += c * sign as f64;
        }
        acc / self.total
    }

    /// Q_k hat for a prefix of k qubit digits (2v + w) in ordering order.
    pub fn estimate_qk(&self, prefix_digits: &[u8]) -> Result<f64> {
        if prefix_digits.len() > self.n || prefix_digits.iter().any(|d| *d > 3) {
            return invalid("prefix must be at most n digits in 0..4");
        }
        let Some(cache) = &self.cache else {
            return Ok(self.q_hat_raw(prefix_digits));
        };
        let key = (prefix_digits.len(), prefix_digits.iter().fold(0u64, |a, d| (a << 2) | *d as u64));
        if let Some(v) = cache.lock().get(&key) {
            return Ok(*v);
        }
        let v = self.q_hat_raw(prefix_digits);
        cache.lock().put(key, v);
        Ok(v)
    }

    /// Same as `estimate_qk` with the prefix given as a Pauli label: its
    /// first k qubits in the ordering.
    pub fn estimate_qk_label(&self, x: &PauliString, k: usize) -> Result<f64> {
        let ds: Vec<u8> = self.ordering.as_slice()[..k].iter().map(|&q| x.digit(q)).collect();
        self.estimate_qk(&ds)
    }

    /// pi(prefix): Q_k / (2^k Q_0) for even length 2k; odd prefixes are the
    /// sum of their two even extensions. Negative values are returned as is.
    pub fn estimate_marginal(&self, prefix: &[u8]) -> Result<f64> {
        if prefix.len() > 2 * self.n || prefix.iter().any(|b| *b > 1) {
            return invalid("prefix must be at most 2n bits");
        }
        if self.purity <= 0.0 {
            return Err(Error::DatasetTooSmall(self.purity));
        }
        if prefix.len() % 2 == 1 {
            let mut ext = prefix.to_vec();
            ext.push(0);
            let a = self.estimate_marginal(&ext)?;
            *ext.last_mut().unwrap() = 1;
            return Ok(a + self.estimate_marginal(&ext)?);
        }
        let ds: Vec<u8> = prefix.chunks_exact(2).map(|c| (c[0] << 1) | c[1]).collect();
        let k = ds.len();
        Ok(self.estimate_qk(&ds)? / ((1u64 << k) as f64 * self.purity))
    }

    /// Estimated purity tr(rho_A^2) of the reduced state on `subset`:
    /// mean of prod_{l in A} s[y_l].
    pub fn subset_purity(&self, subset: &[usize]) -> f64 {
        let pos: Vec<usize> =
            subset.iter().map(|q| self.ordering.as_slice().iter().position(|p| p == q).expect("qubit")).collect();
        let mut acc = 0.0;
        for (i, c) in self.counts.iter().enumerate() {
            let sign: i8 = pos.iter().map(|&k| S_VECTOR[self.digits[i * self.n + k] as usize]).product();
            acc += c * sign as f64;
        }
        acc / self.total
    }
}

impl BitMarginals for MarginalEstimator {
    fn num_bits(&self) -> usize {
        2 * self.n
    }
    fn marginal(&self, prefix: &[u8]) -> Result<f64> {
        self.estimate_marginal(prefix)
    }
}

impl PauliMarginals for MarginalEstimator {
    fn ordering(&self) -> &QubitOrdering {
        &self.ordering
    }
}

/// Hoeffding half-width for a mean of N values in [-1, 1] at confidence 1 - delta.
pub fn hoeffding_epsilon(count: usize, delta: f64) -> f64 {
    (2.0 * (2.0 / delta).ln() / count as f64).sqrt()
}

/// Human-readable one-line summary of an estimator.
pub fn describe(est: &MarginalEstimator) -> String {
    let mut s = String::new();
    let _ = write!(
        s,
        "n={} N={} distinct={} purity={:.6} ordering={}",
        est.n,
        est.dataset_size(),
        est.distinct_outcomes(),
        est.purity(),
        est.ordering
    );
    s
}
