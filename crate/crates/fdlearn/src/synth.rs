//! Synthetic benchmark generator.
//!
//! Attributes are split into consecutive groups of two to four; every
//! even-indexed group carries an exact dependency from its leading
//! attributes onto its last one, the rest carry a soft correlation of
//! strength rho drawn per group. Cell-flip noise is then injected into
//! the attributes that participate in true dependencies. The generator
//! returns the noisy table, the pre-noise copy, the ground truth, and
//! per-group diagnostics; equal configs (seed included) give
//! bit-identical output.

use std::collections::HashSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{CellValue, Dataset};
use crate::error::{Error, Result};
use crate::fdgen::{Fd, FdSet};
use crate::rng;

/// Generator parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub noise_rate: f64,
    pub n_tuples: usize,
    pub n_attributes: usize,
    /// Range for the lhs domain-product / rhs domain size, inclusive.
    pub domain_card_range: (usize, usize),
    /// Range for the number of determining attributes, inclusive.
    pub fd_lhs_size_range: (usize, usize),
    /// Correlation strength is drawn uniformly from this half-open range.
    pub rho_range: (f64, f64),
    pub seed: u64,
}

impl SynthConfig {
    /// Small desk-scale defaults: 1,000 tuples, 8 attributes, modest
    /// domains.
    pub fn small(seed: u64) -> Self {
        SynthConfig {
            noise_rate: 0.0,
            n_tuples: 1000,
            n_attributes: 8,
            domain_card_range: (64, 216),
            fd_lhs_size_range: (1, 3),
            rho_range: (0.0, 0.85),
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.noise_rate) {
            return Err(Error::InvalidParameter("noise_rate must be in [0,1]".into()));
        }
        if self.n_attributes < 2 {
            return Err(Error::InvalidParameter("need at least 2 attributes".into()));
        }
        if self.n_tuples < 2 {
            return Err(Error::InvalidParameter("need at least 2 tuples".into()));
        }
        let (dlo, dhi) = self.domain_card_range;
        if dlo < 2 || dhi < dlo {
            return Err(Error::InvalidParameter(
                "domain cardinality range must satisfy 2 <= lo <= hi".into(),
            ));
        }
        let (llo, lhi) = self.fd_lhs_size_range;
        if llo < 1 || lhi < llo {
            return Err(Error::InvalidParameter(
                "lhs size range must satisfy 1 <= lo <= hi".into(),
            ));
        }
        let (rlo, rhi) = self.rho_range;
        if !(0.0 <= rlo && rlo < rhi && rhi <= 1.0) {
            return Err(Error::InvalidParameter(
                "rho range must satisfy 0 <= lo < hi <= 1".into(),
            ));
        }
        if !partition_feasible(self.n_attributes, llo + 1, lhi + 1) {
            return Err(Error::InvalidParameter(format!(
                "{} attributes cannot be split into groups of {}..={}",
                self.n_attributes,
                llo + 1,
                lhi + 1
            )));
        }
        Ok(())
    }
}

/// Per-group diagnostics recorded in the instance manifest.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupDiag {
    pub lhs: Vec<String>,
    pub rhs: String,
    pub is_fd: bool,
    pub rho: Option<f64>,
    /// Cardinality drawn from the configured range.
    pub requested_cardinality: usize,
    /// Product of the lhs attribute domains actually realized; differs
    /// from the request when the factorization has to round.
    pub lhs_cardinality: usize,
}

/// Generator output: noisy table, ground truth, pre-noise copy, and the
/// exact cells that were flipped.
#[derive(Debug, Clone)]
pub struct SynthOutput {
    pub dataset: Dataset,
    pub truth: FdSet,
    pub clean: Dataset,
    pub noised_cells: Vec<(usize, usize)>,
    pub groups: Vec<GroupDiag>,
}

fn partition_feasible(k: usize, lo: usize, hi: usize) -> bool {
    // some m groups with m*lo <= k <= m*hi
    (1..=k).any(|m| m * lo <= k && k <= m * hi)
}

/// Split k attributes into consecutive group sizes within [lo, hi],
/// drawing uniformly among the sizes that keep the remainder feasible.
fn draw_group_sizes(k: usize, lo: usize, hi: usize, r: &mut impl Rng) -> Vec<usize> {
    let mut sizes = Vec::new();
    let mut rem = k;
    while rem > 0 {
        let candidates: Vec<usize> = (lo..=hi.min(rem))
            .filter(|&g| rem - g == 0 || partition_feasible(rem - g, lo, hi))
            .collect();
        let g = candidates[r.gen_range(0..candidates.len())];
        sizes.push(g);
        rem -= g;
    }
    sizes
}

/// Near-equal integer factors (each >= 2) whose product approximates v.
fn near_equal_factors(v: usize, m: usize) -> Vec<usize> {
    if m == 1 {
        return vec![v.max(2)];
    }
    let base = (v as f64).powf(1.0 / m as f64).round().max(2.0) as usize;
    let mut factors = vec![base; m];
    loop {
        let prod: usize = factors.iter().product();
        if prod == v {
            break;
        }
        let cur = prod.abs_diff(v);
        let mut best: Option<(usize, usize, usize)> = None;
        for i in 0..m {
            for delta in [-1i64, 1i64] {
                let nf = factors[i] as i64 + delta;
                if nf < 2 {
                    continue;
                }
                let nprod = prod / factors[i] * nf as usize;
                let nd = nprod.abs_diff(v);
                if nd < cur && best.map_or(true, |(_, _, bd)| nd < bd) {
                    best = Some((i, nf as usize, nd));
                }
            }
        }
        match best {
            Some((i, nf, _)) => factors[i] = nf,
            None => break,
        }
    }
    factors
}

/// Generate one benchmark instance.
pub fn generate(cfg: &SynthConfig) -> Result<SynthOutput> {
    cfg.validate()?;
    let mut r = rng::rng(cfg.seed);
    let k = cfg.n_attributes;
    let n = cfg.n_tuples;
    let schema: Vec<String> = (0..k).map(|i| format!("A{i}")).collect();

    let (llo, lhi) = cfg.fd_lhs_size_range;
    let sizes = draw_group_sizes(k, llo + 1, lhi + 1, &mut r);

    let mut columns: Vec<Vec<CellValue>> = vec![Vec::new(); k];
    let mut truth_fds = Vec::new();
    let mut groups = Vec::new();

    let mut start = 0usize;
    for (gi, &size) in sizes.iter().enumerate() {
        let lhs_attrs = &schema[start..start + size - 1];
        let rhs_attr = &schema[start + size - 1];
        let m = size - 1;

        let v = r.gen_range(cfg.domain_card_range.0..=cfg.domain_card_range.1);
        let factors = near_equal_factors(v, m);
        let lhs_card: usize = factors.iter().product();

        // value map dom(X) -> dom(Y), one target per lhs combination
        let value_map: Vec<usize> = (0..lhs_card).map(|_| r.gen_range(0..v)).collect();

        let is_fd = gi % 2 == 0;
        let rho = if is_fd {
            None
        } else {
            Some(r.gen_range(cfg.rho_range.0..cfg.rho_range.1))
        };

        let mut lhs_cols: Vec<Vec<CellValue>> = vec![Vec::with_capacity(n); m];
        let mut rhs_col: Vec<CellValue> = Vec::with_capacity(n);
        for _ in 0..n {
            let mut combo = 0usize;
            for (j, &f) in factors.iter().enumerate() {
                let x = r.gen_range(0..f);
                combo = combo * f + x;
                lhs_cols[j].push(CellValue::Categorical(x.to_string()));
            }
            let r0 = value_map[combo];
            let y = match rho {
                None => r0,
                Some(rho) => {
                    if r.gen_bool(rho) {
                        r0
                    } else {
                        // uniform over the other v-1 values
                        let mut other = r.gen_range(0..v - 1);
                        if other >= r0 {
                            other += 1;
                        }
                        other
                    }
                }
            };
            rhs_col.push(CellValue::Categorical(y.to_string()));
        }
        for (j, col) in lhs_cols.into_iter().enumerate() {
            columns[start + j] = col;
        }
        columns[start + size - 1] = rhs_col;

        if is_fd {
            truth_fds.push(Fd {
                lhs: lhs_attrs.to_vec(),
                rhs: rhs_attr.clone(),
                weights: vec![1.0; m],
            });
        }
        groups.push(GroupDiag {
            lhs: lhs_attrs.to_vec(),
            rhs: rhs_attr.clone(),
            is_fd,
            rho,
            requested_cardinality: v,
            lhs_cardinality: lhs_card,
        });
        start += size;
    }

    let clean = Dataset::new(schema.clone(), columns)?;
    let truth = FdSet::from_fds(truth_fds, schema.clone(), 0.0)?;

    let fd_attrs: Vec<String> = {
        let mut in_fd: HashSet<&String> = HashSet::new();
        for fd in truth.fds() {
            in_fd.extend(fd.lhs.iter());
            in_fd.insert(&fd.rhs);
        }
        schema.iter().filter(|a| in_fd.contains(a)).cloned().collect()
    };

    let noise_seed = r.gen::<u64>();
    let (dataset, noised_cells) = inject_noise(&clean, cfg.noise_rate, &fd_attrs, noise_seed)?;

    Ok(SynthOutput {
        dataset,
        truth,
        clean,
        noised_cells,
        groups,
    })
}

fn domain_key(c: &CellValue) -> Option<String> {
    match c {
        CellValue::Categorical(s) => Some(format!("c:{s}")),
        CellValue::Numeric(v) => Some(format!("n:{:016x}", v.to_bits())),
        CellValue::Missing => None,
    }
}

/// Flip `floor(rate * n * |attrs|)` distinct cells, chosen uniformly over
/// the rows of the listed attributes, each to a different uniformly
/// chosen value from that attribute's observed domain. Cells whose
/// attribute offers no alternative value are skipped and a replacement
/// cell is drawn.
pub fn inject_noise(
    d: &Dataset,
    rate: f64,
    attrs: &[String],
    seed: u64,
) -> Result<(Dataset, Vec<(usize, usize)>)> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::InvalidParameter("noise rate must be in [0,1]".into()));
    }
    let mut cols = Vec::with_capacity(attrs.len());
    for a in attrs {
        cols.push(
            d.attribute_index(a)
                .ok_or_else(|| Error::InvalidParameter(format!("unknown attribute `{a}`")))?,
        );
    }

    let n = d.n();
    let target = (rate * (n * cols.len()) as f64).floor() as usize;
    if target == 0 {
        return Ok((d.clone(), Vec::new()));
    }

    // observed domain per attribute, in first-occurrence order
    let mut domains: Vec<Vec<CellValue>> = Vec::with_capacity(cols.len());
    for &c in &cols {
        let mut seen = HashSet::new();
        let mut dom = Vec::new();
        for cell in d.column(c) {
            if let Some(key) = domain_key(cell) {
                if seen.insert(key) {
                    dom.push(cell.clone());
                }
            }
        }
        domains.push(dom);
    }

    let flippable = |ai: usize, cell: &CellValue| -> bool {
        let dom = &domains[ai];
        match cell {
            CellValue::Missing => !dom.is_empty(),
            other => dom.iter().any(|v| v != other),
        }
    };

    let mut total_flippable = 0usize;
    for (ai, &c) in cols.iter().enumerate() {
        total_flippable += d.column(c).iter().filter(|cell| flippable(ai, cell)).count();
    }
    if total_flippable < target {
        return Err(Error::InvalidParameter(format!(
            "cannot flip {target} cells: only {total_flippable} have an alternative value"
        )));
    }

    let mut r = rng::rng(seed);
    let grid = n * cols.len();
    let mut chosen: HashSet<usize> = HashSet::with_capacity(target);
    let mut order: Vec<(usize, usize)> = Vec::with_capacity(target);
    while order.len() < target {
        let idx = r.gen_range(0..grid);
        if chosen.contains(&idx) {
            continue;
        }
        let row = idx % n;
        let ai = idx / n;
        if !flippable(ai, d.cell(row, cols[ai])) {
            continue;
        }
        chosen.insert(idx);
        order.push((row, ai));
    }

    let mut columns: Vec<Vec<CellValue>> = (0..d.k()).map(|j| d.column(j).to_vec()).collect();
    let mut noised = Vec::with_capacity(target);
    for (row, ai) in order {
        let col = cols[ai];
        let current = &columns[col][row];
        let dom = &domains[ai];
        let excluded = dom.iter().filter(|v| *v == current).count();
        let mut pick = r.gen_range(0..dom.len() - excluded);
        let mut replacement = None;
        for v in dom {
            if v == current {
                continue;
            }
            if pick == 0 {
                replacement = Some(v.clone());
                break;
            }
            pick -= 1;
        }
        columns[col][row] = replacement.expect("flippable cell has an alternative");
        noised.push((row, col));
    }
    noised.sort_unstable();

    let dataset = Dataset::new(d.schema().to_vec(), columns)?;
    Ok((dataset, noised))
}

/// Noise levels from the benchmark protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NoiseLevel {
    Zero,
    Low,
    High,
}

impl NoiseLevel {
    pub fn rate(&self) -> f64 {
        match self {
            NoiseLevel::Zero => 0.0,
            NoiseLevel::Low => 0.01,
            NoiseLevel::High => 0.30,
        }
    }

    fn label(&self) -> &'static str {
        match self {
            NoiseLevel::Zero => "zero",
            NoiseLevel::Low => "low",
            NoiseLevel::High => "high",
        }
    }
}

/// Small/large switch for tuples, attributes, and cardinality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scale {
    Small,
    Large,
}

impl Scale {
    fn label(&self) -> &'static str {
        match self {
            Scale::Small => "s",
            Scale::Large => "l",
        }
    }
}

/// One benchmark setting: noise level plus small/large switches for
/// tuple count, attribute count, and domain cardinality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Setting {
    pub noise: NoiseLevel,
    pub tuples: Scale,
    pub attributes: Scale,
    pub cardinality: Scale,
}

impl Setting {
    pub fn new(noise: NoiseLevel, tuples: Scale, attributes: Scale, cardinality: Scale) -> Self {
        Setting {
            noise,
            tuples,
            attributes,
            cardinality,
        }
    }

    /// Parse labels like `zero/s/s/s` or `high/l/s/l`.
    pub fn parse(text: &str) -> Result<Setting> {
        let parts: Vec<&str> = text.split('/').collect();
        if parts.len() != 4 {
            return Err(Error::InvalidParameter(format!(
                "setting `{text}` must look like noise/t/r/d, e.g. zero/s/s/s"
            )));
        }
        let noise = match parts[0].to_ascii_lowercase().as_str() {
            "zero" => NoiseLevel::Zero,
            "low" => NoiseLevel::Low,
            "high" => NoiseLevel::High,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown noise level `{other}` (zero|low|high)"
                )))
            }
        };
        let scale = |s: &str| -> Result<Scale> {
            match s.to_ascii_lowercase().as_str() {
                "s" | "small" => Ok(Scale::Small),
                "l" | "large" => Ok(Scale::Large),
                other => Err(Error::InvalidParameter(format!(
                    "unknown scale `{other}` (s|l)"
                ))),
            }
        };
        Ok(Setting {
            noise,
            tuples: scale(parts[1])?,
            attributes: scale(parts[2])?,
            cardinality: scale(parts[3])?,
        })
    }

    pub fn label(&self) -> String {
        format!(
            "{}_{}_{}_{}",
            self.noise.label(),
            self.tuples.label(),
            self.attributes.label(),
            self.cardinality.label()
        )
    }

    /// All 24 combinations of the four dimensions.
    pub fn all24() -> Vec<Setting> {
        let mut out = Vec::new();
        for noise in [NoiseLevel::Zero, NoiseLevel::Low, NoiseLevel::High] {
            for tuples in [Scale::Small, Scale::Large] {
                for attributes in [Scale::Small, Scale::Large] {
                    for cardinality in [Scale::Small, Scale::Large] {
                        out.push(Setting::new(noise, tuples, attributes, cardinality));
                    }
                }
            }
        }
        out
    }

    /// Concrete generator config for one instance. The attribute count
    /// is drawn uniformly from the setting's range using the seed, so
    /// each instance records its own resolved value.
    pub fn config(&self, seed: u64) -> SynthConfig {
        let mut r = rng::rng(rng::derive(seed, 0xa77));
        let n_attributes = match self.attributes {
            Scale::Small => r.gen_range(8..=16),
            Scale::Large => r.gen_range(40..=80),
        };
        SynthConfig {
            noise_rate: self.noise.rate(),
            n_tuples: match self.tuples {
                Scale::Small => 1000,
                Scale::Large => 100_000,
            },
            n_attributes,
            domain_card_range: match self.cardinality {
                Scale::Small => (64, 216),
                Scale::Large => (1000, 1728),
            },
            fd_lhs_size_range: (1, 3),
            rho_range: (0.0, 0.85),
            seed,
        }
    }
}
