//! Classical post-processing of measured bitstrings into actions.
//!
//! A [`PostProcessing`] is a total map `{0,1}^n -> {0, …, M-1}`; bitstrings are
//! basis indices with `b_{n-1}` as the most significant bit. Besides decoding,
//! this module measures how many bits a map has to look at (extracted
//! information and its average, the globality) and enumerates balanced
//! partitionings.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::io::fmt_f64;
use crate::qsim::{format_bits, parse_bits};

/// Largest register for which bit-subset searches and explicit tables are allowed.
pub const MAX_EXPLICIT_QUBITS: usize = 16;

/// Exhaustive partition enumeration is refused above this many partitionings.
pub const MAX_EXHAUSTIVE_PARTITIONINGS: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decoder {
    /// `a = b_{n-1}` (two actions).
    MsbLocal,
    /// Parity of the `q` most significant bits (two actions).
    QLocalParity { q: usize },
    /// Recursive parity construction with closed form
    /// `a = [b_0 … b_{m-1} (b_m ⊕ … ⊕ b_{n-1})]_10`, `m = log2(M) - 1`.
    GlobalRecursive,
    /// `table[b]` is the action of bitstring `b`.
    ExplicitTable(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PostProcessing {
    decoder: Decoder,
    n_qubits: usize,
    num_actions: usize,
}

impl PostProcessing {
    pub fn msb_local(n_qubits: usize) -> Result<Self> {
        Self::new(Decoder::MsbLocal, n_qubits, 2)
    }

    pub fn q_local_parity(n_qubits: usize, q: usize) -> Result<Self> {
        Self::new(Decoder::QLocalParity { q }, n_qubits, 2)
    }

    pub fn global_recursive(n_qubits: usize, num_actions: usize) -> Result<Self> {
        Self::new(Decoder::GlobalRecursive, n_qubits, num_actions)
    }

    pub fn explicit(n_qubits: usize, num_actions: usize, table: Vec<usize>) -> Result<Self> {
        Self::new(Decoder::ExplicitTable(table), n_qubits, num_actions)
    }

    /// Builds an explicit table from one list of basis indices per action.
    /// The lists must be disjoint and cover all `2^n` strings.
    pub fn from_sets(n_qubits: usize, sets: &[Vec<usize>]) -> Result<Self> {
        check_explicit_size(n_qubits)?;
        let mut table = vec![usize::MAX; 1 << n_qubits];
        for (action, set) in sets.iter().enumerate() {
            for &b in set {
                let slot = table
                    .get_mut(b)
                    .ok_or(Error::BitstringLength(b, n_qubits))?;
                if *slot != usize::MAX {
                    return Err(Error::InvalidPostProcessing(format!(
                        "bitstring {} assigned to actions {} and {action}",
                        format_bits(b, n_qubits),
                        *slot
                    )));
                }
                *slot = action;
            }
        }
        Self::explicit(n_qubits, sets.len(), table)
    }

    pub fn new(decoder: Decoder, n_qubits: usize, num_actions: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > crate::qsim::MAX_QUBITS {
            return Err(Error::QubitCount(n_qubits));
        }
        let invalid = |msg: String| Err(Error::InvalidPostProcessing(msg));
        match &decoder {
            Decoder::MsbLocal => {
                if num_actions != 2 {
                    return invalid(format!("msb-local decoding has 2 actions, not {num_actions}"));
                }
            }
            Decoder::QLocalParity { q } => {
                if num_actions != 2 {
                    return invalid(format!("parity decoding has 2 actions, not {num_actions}"));
                }
                if *q == 0 || *q > n_qubits {
                    return invalid(format!("parity prefix length {q} not in 1..={n_qubits}"));
                }
            }
            Decoder::GlobalRecursive => {
                if num_actions < 2 || !num_actions.is_power_of_two() {
                    return invalid(format!("recursive decoding needs a power-of-two action count >= 2, got {num_actions}"));
                }
                if num_actions.trailing_zeros() as usize > n_qubits {
                    return invalid(format!("{num_actions} actions exceed 2^{n_qubits} bitstrings"));
                }
            }
            Decoder::ExplicitTable(table) => {
                check_explicit_size(n_qubits)?;
                if table.len() != 1 << n_qubits {
                    return invalid(format!("table has {} entries, expected {}", table.len(), 1usize << n_qubits));
                }
                if num_actions == 0 {
                    return invalid("table needs at least one action".into());
                }
                if let Some((b, a)) = table.iter().enumerate().find(|(_, &a)| a >= num_actions) {
                    return invalid(format!(
                        "bitstring {} maps to {} outside 0..{num_actions}",
                        format_bits(b, n_qubits),
                        if *a == usize::MAX { "nothing".to_string() } else { a.to_string() }
                    ));
                }
            }
        }
        Ok(Self {
            decoder,
            n_qubits,
            num_actions,
        })
    }

    pub fn decoder(&self) -> &Decoder {
        &self.decoder
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    /// Action for basis index `bits`.
    pub fn decode(&self, bits: usize) -> Result<usize> {
        if bits >> self.n_qubits != 0 {
            return Err(Error::BitstringLength(bits, self.n_qubits));
        }
        Ok(self.decode_unchecked(bits))
    }

    #[inline]
    pub(crate) fn decode_unchecked(&self, bits: usize) -> usize {
        let n = self.n_qubits;
        match &self.decoder {
            Decoder::MsbLocal => (bits >> (n - 1)) & 1,
            Decoder::QLocalParity { q } => ((bits >> (n - q)).count_ones() & 1) as usize,
            Decoder::GlobalRecursive => {
                let m = self.num_actions.trailing_zeros() as usize - 1;
                let mut action = 0usize;
                for k in 0..m {
                    action = (action << 1) | ((bits >> k) & 1);
                }
                (action << 1) | ((bits >> m).count_ones() & 1) as usize
            }
            Decoder::ExplicitTable(table) => table[bits],
        }
    }

    /// Explicit lookup table of this map (`n` ≤ [`MAX_EXPLICIT_QUBITS`]).
    pub fn to_table(&self) -> Result<Vec<usize>> {
        check_explicit_size(self.n_qubits)?;
        Ok((0..1usize << self.n_qubits).map(|b| self.decode_unchecked(b)).collect())
    }

    /// `{ b : decode(b) = a }` for every action.
    pub fn preimages(&self) -> Result<Vec<Vec<usize>>> {
        let mut sets = vec![Vec::new(); self.num_actions];
        for (b, a) in self.to_table()?.into_iter().enumerate() {
            sets[a].push(b);
        }
        Ok(sets)
    }

    /// Writes the map as `bits,action` lines.
    pub fn write_table<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        let table = self.to_table().map_err(std::io::Error::other)?;
        for (b, a) in table.into_iter().enumerate() {
            writeln!(out, "{},{a}", format_bits(b, self.n_qubits))?;
        }
        Ok(())
    }

    /// Parses `bits,action` lines. Blank lines and `#` comments are skipped.
    /// The action count is one more than the largest action seen.
    pub fn read_table<R: BufRead>(input: R) -> Result<Self> {
        let mut entries = Vec::new();
        let mut n_qubits = None;
        for (lineno, line) in input.lines().enumerate() {
            let line = line.map_err(|e| Error::Parse(e.to_string()))?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (bits, action) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("line {}: expected 'bits,action'", lineno + 1)))?;
            let (value, len) = parse_bits(bits)?;
            if *n_qubits.get_or_insert(len) != len {
                return Err(Error::Parse(format!("line {}: bitstring length {len} differs from earlier lines", lineno + 1)));
            }
            let action: usize = action
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad action '{}'", lineno + 1, action.trim())))?;
            entries.push((value, action));
        }
        let n = n_qubits.ok_or_else(|| Error::Parse("empty table".into()))?;
        check_explicit_size(n)?;
        let mut table = vec![usize::MAX; 1 << n];
        for (b, a) in entries {
            if table[b] != usize::MAX {
                return Err(Error::InvalidPostProcessing(format!("bitstring {} listed twice", format_bits(b, n))));
            }
            table[b] = a;
        }
        if let Some(b) = table.iter().position(|&a| a == usize::MAX) {
            return Err(Error::InvalidPostProcessing(format!("bitstring {} has no action", format_bits(b, n))));
        }
        let num_actions = table.iter().max().unwrap() + 1;
        Self::explicit(n, num_actions, table)
    }
}

impl fmt::Display for PostProcessing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.decoder {
            Decoder::MsbLocal => write!(f, "msb-local(n={})", self.n_qubits),
            Decoder::QLocalParity { q } => write!(f, "parity(q={q}, n={})", self.n_qubits),
            Decoder::GlobalRecursive => write!(f, "global(n={}, M={})", self.n_qubits, self.num_actions),
            Decoder::ExplicitTable(_) => write!(f, "table(n={}, M={})", self.n_qubits, self.num_actions),
        }
    }
}

fn check_explicit_size(n: usize) -> Result<()> {
    if n == 0 || n > MAX_EXPLICIT_QUBITS {
        return Err(Error::TooLarge {
            what: "explicit bitstring enumeration",
            n,
            limit: MAX_EXPLICIT_QUBITS,
        });
    }
    Ok(())
}

/// The four-action partitioning of 4-bit strings used to introduce extracted information:
/// `{0000,0010,0100,0110}`, `{0001,0011,0101,0111}`, `{1000,1010,1101,1111}`, `{1001,1011,1100,1110}`.
pub fn four_action_example() -> PostProcessing {
    PostProcessing::from_sets(
        4,
        &[
            vec![0b0000, 0b0010, 0b0100, 0b0110],
            vec![0b0001, 0b0011, 0b0101, 0b0111],
            vec![0b1000, 0b1010, 0b1101, 0b1111],
            vec![0b1001, 0b1011, 0b1100, 0b1110],
        ],
    )
    .expect("static table is a partition")
}

/// Two-action 4-bit partitioning `{1,3,5,6,9,10,12,15} | {0,2,4,7,8,11,13,14}`
/// with globality 3.5, between the 3-bit and 4-bit parities.
pub fn three_and_a_half_example() -> PostProcessing {
    PostProcessing::from_sets(4, &[vec![1, 3, 5, 6, 9, 10, 12, 15], vec![0, 2, 4, 7, 8, 11, 13, 14]])
        .expect("static table is a partition")
}

/// Materializes the recursive parity construction level by level
/// (`m = log2(M) - 1`): the level-0 sets split all strings by full parity, and
/// level `m` keeps the strings of the level `m-1` set `a_m…a_2(a_1⊕a_0)` whose
/// bits `m..n-1` have parity `a_0`.
pub fn partition_sets(n_qubits: usize, num_actions: usize) -> Result<Vec<Vec<usize>>> {
    // reuse the constructor checks
    PostProcessing::global_recursive(n_qubits, num_actions)?;
    check_explicit_size(n_qubits)?;
    let m = num_actions.trailing_zeros() as usize - 1;
    Ok((0..num_actions)
        .map(|a| {
            (0..1usize << n_qubits)
                .filter(|&b| in_recursive_set(m, a, b))
                .collect()
        })
        .collect())
}

fn in_recursive_set(level: usize, action: usize, b: usize) -> bool {
    if level == 0 {
        return (b.count_ones() & 1) as usize == action;
    }
    let a0 = action & 1;
    let a1 = (action >> 1) & 1;
    let parent = ((action >> 2) << 1) | (a1 ^ a0);
    ((b >> level).count_ones() & 1) as usize == a0 && in_recursive_set(level - 1, parent, b)
}

/// Smallest number of bit positions of `bits` that pins down `f(bits)`:
/// exhaustive search over position subsets in order of increasing size.
pub fn extracted_information(f: &PostProcessing, bits: usize) -> Result<usize> {
    let n = f.n_qubits;
    check_explicit_size(n)?;
    let target = f.decode(bits)?;
    let full = (1usize << n) - 1;
    for k in 0..=n {
        let mut found = false;
        for_each_mask_with_popcount(n, k, |mask| {
            if found {
                return;
            }
            let free = full & !mask;
            // walk every completion of the free positions
            let mut sub = free;
            loop {
                let candidate = (bits & mask) | sub;
                if f.decode_unchecked(candidate) != target {
                    return;
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & free;
            }
            found = true;
        });
        if found {
            return Ok(k);
        }
    }
    unreachable!("fixing all n bits always determines the action")
}

fn for_each_mask_with_popcount(n: usize, k: usize, mut visit: impl FnMut(usize)) {
    if k == 0 {
        visit(0);
        return;
    }
    if k > n {
        return;
    }
    // Gosper's hack
    let mut mask: usize = (1 << k) - 1;
    let limit = 1usize << n;
    while mask < limit {
        visit(mask);
        let c = mask & mask.wrapping_neg();
        let r = mask + c;
        mask = (((r ^ mask) >> 2) / c) | r;
    }
}

/// Exact non-negative rational `numer / denom`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ratio {
    pub numer: u64,
    pub denom: u64,
}

impl Ratio {
    pub fn new(numer: u64, denom: u64) -> Self {
        let g = gcd(numer, denom).max(1);
        Self {
            numer: numer / g,
            denom: denom / g,
        }
    }

    pub fn to_f64(self) -> f64 {
        self.numer as f64 / self.denom as f64
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom == 1 {
            write!(f, "{}", self.numer)
        } else {
            write!(f, "{}/{}", self.numer, self.denom)
        }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalityReport {
    pub n_qubits: usize,
    pub num_actions: usize,
    /// Extracted information per basis index.
    pub extracted: Vec<u8>,
    /// Σ extracted information; the globality is `total / 2^n`.
    pub total: u64,
}

impl GlobalityReport {
    pub fn globality(&self) -> Ratio {
        Ratio::new(self.total, 1u64 << self.n_qubits)
    }

    pub fn value(&self) -> f64 {
        self.total as f64 / (1u64 << self.n_qubits) as f64
    }

    /// Writes `bits,action,ei` lines.
    pub fn write_table<W: Write>(&self, f: &PostProcessing, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "bits,action,ei")?;
        for (b, ei) in self.extracted.iter().enumerate() {
            writeln!(out, "{},{},{ei}", format_bits(b, self.n_qubits), f.decode_unchecked(b))?;
        }
        Ok(())
    }
}

const NO_ACTION: u32 = u32::MAX;

/// Globality `G = 2^{-n} Σ_b EI(b)` with every extracted information value.
///
/// Runs in `O(n·3^n)`: for every position subset `S` and every assignment of
/// the positions in `S`, it first records whether the map is constant on that
/// cylinder, then propagates the smallest constant sub-cylinder size upward.
pub fn globality(f: &PostProcessing) -> Result<GlobalityReport> {
    let n = f.n_qubits;
    check_explicit_size(n)?;
    let full = (1usize << n) - 1;
    let mut offsets = Vec::with_capacity(full + 2);
    let mut acc = 0usize;
    for m in 0..=full {
        offsets.push(acc);
        acc += 1 << (m as u32).count_ones();
    }

    // constant[offsets[m] + c]: action if f is constant on the cylinder fixing
    // positions `m` to the compressed assignment `c`
    let mut constant = vec![NO_ACTION; acc];
    for b in 0..=full {
        constant[offsets[full] + b] = f.decode_unchecked(b) as u32;
    }
    for m in (0..full).rev() {
        let j = (!m & full).trailing_zeros() as usize;
        let parent = m | (1 << j);
        let rank = (m & ((1 << j) - 1)).count_ones() as usize;
        let low = (1usize << rank) - 1;
        let size = 1usize << (m as u32).count_ones();
        for c in 0..size {
            let c0 = (c & low) | ((c >> rank) << (rank + 1));
            let a0 = constant[offsets[parent] + c0];
            let a1 = constant[offsets[parent] + (c0 | (1 << rank))];
            constant[offsets[m] + c] = if a0 == a1 { a0 } else { NO_ACTION };
        }
    }

    // best[offsets[m] + c]: fewest fixed positions, among subsets of m, that
    // already determine the action on the cylinder (m, c)
    let mut best = vec![u8::MAX; acc];
    for m in 0..=full {
        let pop = (m as u32).count_ones() as u8;
        let size = 1usize << pop;
        for c in 0..size {
            let mut value = if constant[offsets[m] + c] != NO_ACTION { pop } else { u8::MAX };
            let mut rest = m;
            while rest != 0 {
                let j = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let child = m ^ (1 << j);
                let rank = (m & ((1 << j) - 1)).count_ones() as usize;
                let cc = (c & ((1 << rank) - 1)) | ((c >> (rank + 1)) << rank);
                value = value.min(best[offsets[child] + cc]);
            }
            best[offsets[m] + c] = value;
        }
    }
    let extracted: Vec<u8> = best[offsets[full]..].to_vec();
    let total = extracted.iter().map(|&e| e as u64).sum();
    Ok(GlobalityReport {
        n_qubits: n,
        num_actions: f.num_actions,
        extracted,
        total,
    })
}

/// Number of ways to split `2^n` strings into `M` unlabeled blocks of equal size:
/// `N! / (M! · ((N/M)!)^M)`.
pub fn count_balanced_partitionings(n_qubits: usize, num_actions: usize) -> Result<u128> {
    if n_qubits >= 64 {
        return Err(Error::Overflow(format!("2^{n_qubits} strings")));
    }
    let total = 1u128 << n_qubits;
    let m = num_actions as u128;
    if m == 0 || !total.is_multiple_of(m) {
        return Err(Error::InvalidPostProcessing(format!("{num_actions} does not divide 2^{n_qubits}")));
    }
    let block = total / m;
    let overflow = || Error::Overflow(format!("partition count for n={n_qubits}, M={num_actions}"));
    // product of binomials C(remaining, block), then divide by M!
    let mut count: u128 = 1;
    let mut remaining = total;
    for _ in 0..m {
        count = count.checked_mul(binomial(remaining, block).ok_or_else(overflow)?).ok_or_else(overflow)?;
        remaining -= block;
    }
    for k in 2..=m {
        count /= k;
    }
    Ok(count)
}

fn binomial(n: u128, k: u128) -> Option<u128> {
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        // r * (n - i) = C(n, i+1) * (i + 1), so the division is exact
        r = r.checked_mul(n - i)? / (i + 1);
    }
    Some(r)
}

#[derive(Clone, Debug)]
pub enum HistogramMode {
    Exhaustive,
    Sampled { count: usize },
}

/// Counts of globality values over balanced partitionings. Keys are `Σ EI`
/// (the globality times `2^n`), so buckets are exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalityHistogram {
    pub n_qubits: usize,
    pub num_actions: usize,
    pub counts: BTreeMap<u64, u64>,
}

impl GlobalityHistogram {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Count of partitionings with globality exactly `g`.
    pub fn count_at(&self, g: Ratio) -> u64 {
        let scale = 1u64 << self.n_qubits;
        if !scale.is_multiple_of(g.denom) {
            return 0;
        }
        self.counts.get(&(g.numer * (scale / g.denom))).copied().unwrap_or(0)
    }

    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "g_value,count")?;
        let scale = (1u64 << self.n_qubits) as f64;
        for (total, count) in &self.counts {
            writeln!(out, "{},{count}", fmt_f64(*total as f64 / scale))?;
        }
        Ok(())
    }
}

/// Histogram of globality over balanced partitionings of `n`-bit strings into `M` actions.
///
/// Exhaustive mode visits each unlabeled partitioning once: strings are assigned
/// in increasing order and a new block may only be opened with the next unused
/// label, so block 0 always holds `0…0`.
pub fn globality_histogram<R: Rng + ?Sized>(
    n_qubits: usize,
    num_actions: usize,
    mode: &HistogramMode,
    rng: &mut R,
) -> Result<GlobalityHistogram> {
    check_explicit_size(n_qubits)?;
    let total_count = count_balanced_partitionings(n_qubits, num_actions);
    let size = 1usize << n_qubits;
    let block = size / num_actions;
    let mut counts = BTreeMap::new();
    let mut record = |table: &[usize]| -> Result<()> {
        let f = PostProcessing::explicit(n_qubits, num_actions, table.to_vec())?;
        *counts.entry(globality(&f)?.total).or_insert(0) += 1;
        Ok(())
    };
    match mode {
        HistogramMode::Exhaustive => {
            let total_count = total_count?;
            if total_count > MAX_EXHAUSTIVE_PARTITIONINGS {
                return Err(Error::TooLarge {
                    what: "exhaustive partition enumeration",
                    n: n_qubits,
                    limit: MAX_EXHAUSTIVE_PARTITIONINGS as usize,
                });
            }
            let mut table = vec![0usize; size];
            let mut fill = vec![0usize; num_actions];
            enumerate_balanced(&mut table, &mut fill, 0, 0, block, &mut record)?;
        }
        HistogramMode::Sampled { count } => {
            if num_actions == 0 || !size.is_multiple_of(num_actions) {
                return Err(Error::InvalidPostProcessing(format!("{num_actions} does not divide 2^{n_qubits}")));
            }
            let mut order: Vec<usize> = (0..size).collect();
            let mut table = vec![0usize; size];
            for _ in 0..*count {
                order.shuffle(rng);
                for (pos, &b) in order.iter().enumerate() {
                    table[b] = pos / block;
                }
                record(&table)?;
            }
        }
    }
    Ok(GlobalityHistogram {
        n_qubits,
        num_actions,
        counts,
    })
}

fn enumerate_balanced(
    table: &mut [usize],
    fill: &mut [usize],
    pos: usize,
    opened: usize,
    block: usize,
    visit: &mut dyn FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    if pos == table.len() {
        return visit(table);
    }
    let limit = (opened + 1).min(fill.len());
    for label in 0..limit {
        if fill[label] == block {
            continue;
        }
        table[pos] = label;
        fill[label] += 1;
        enumerate_balanced(table, fill, pos + 1, opened.max(label + 1), block, visit)?;
        fill[label] -= 1;
    }
    Ok(())
}
