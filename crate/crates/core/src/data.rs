//! Observation storage, CSV ingestion and the cluster / sub-cluster nesting map.
//!
//! Labels are kept as opaque strings. Internally each label column is stored
//! as a [`Factor`] (distinct levels plus one code per observation) so that
//! simulated datasets with thousands of rows do not allocate a string per row.

use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::ops::Range;
use std::path::Path;

use crate::error::{Error, Result};

/// A categorical column: distinct levels in first-appearance order and one
/// level index per observation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    levels: Vec<String>,
    codes: Vec<u32>,
}

impl Factor {
    pub fn from_labels<S: AsRef<str>>(labels: &[S]) -> Self {
        let mut index: HashMap<&str, u32> = HashMap::new();
        let mut levels = Vec::new();
        let mut codes = Vec::with_capacity(labels.len());
        for label in labels {
            let label = label.as_ref();
            let code = *index.entry(label).or_insert_with(|| {
                levels.push(label.to_string());
                (levels.len() - 1) as u32
            });
            codes.push(code);
        }
        Factor { levels, codes }
    }

    /// Builds a factor from precomputed codes. Every code must index `levels`.
    pub fn from_codes(levels: Vec<String>, codes: Vec<u32>) -> Result<Self> {
        if let Some(bad) = codes.iter().find(|&&c| c as usize >= levels.len()) {
            return Err(Error::Invalid(format!(
                "label code {bad} out of range for {} levels",
                levels.len()
            )));
        }
        Ok(Factor { levels, codes })
    }

    pub fn levels(&self) -> &[String] {
        &self.levels
    }

    pub fn codes(&self) -> &[u32] {
        &self.codes
    }

    pub fn label(&self, i: usize) -> &str {
        &self.levels[self.codes[i] as usize]
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }
}

/// One regression dataset: outcome, scalar regressor of interest, `d`
/// controls and the nested cluster labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    y: Vec<f64>,
    x: Vec<f64>,
    /// Column-major: `controls[c][i]` is control `c` for observation `i`.
    controls: Vec<Vec<f64>>,
    cluster: Factor,
    subcluster: Factor,
}

impl Dataset {
    pub fn new<S: AsRef<str>>(
        y: Vec<f64>,
        x: Vec<f64>,
        controls: Vec<Vec<f64>>,
        cluster: &[S],
        subcluster: &[S],
    ) -> Result<Self> {
        Self::from_factors(
            y,
            x,
            controls,
            Factor::from_labels(cluster),
            Factor::from_labels(subcluster),
        )
    }

    pub fn from_factors(
        y: Vec<f64>,
        x: Vec<f64>,
        controls: Vec<Vec<f64>>,
        cluster: Factor,
        subcluster: Factor,
    ) -> Result<Self> {
        let n = y.len();
        if n == 0 {
            return Err(Error::Invalid("dataset has no observations".into()));
        }
        let lengths_ok = x.len() == n
            && cluster.len() == n
            && subcluster.len() == n
            && controls.iter().all(|c| c.len() == n);
        if !lengths_ok {
            return Err(Error::Invalid("columns have unequal lengths".into()));
        }
        let finite = |v: &[f64]| v.iter().position(|a| !a.is_finite());
        if let Some(i) = finite(&y) {
            return Err(Error::Invalid(format!(
                "outcome is not finite at observation {i}"
            )));
        }
        if let Some(i) = finite(&x) {
            return Err(Error::Invalid(format!(
                "regressor is not finite at observation {i}"
            )));
        }
        for (c, col) in controls.iter().enumerate() {
            if let Some(i) = finite(col) {
                return Err(Error::Invalid(format!(
                    "control {c} is not finite at observation {i}"
                )));
            }
        }
        check_nesting(&cluster, &subcluster)?;
        Ok(Dataset {
            y,
            x,
            controls,
            cluster,
            subcluster,
        })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    /// Number of controls.
    pub fn d(&self) -> usize {
        self.controls.len()
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn controls(&self) -> &[Vec<f64>] {
        &self.controls
    }

    pub fn cluster(&self) -> &Factor {
        &self.cluster
    }

    pub fn subcluster(&self) -> &Factor {
        &self.subcluster
    }

    /// Copy with the outcome replaced. Used by bootstrap and rescaling checks.
    pub fn with_outcome(&self, y: Vec<f64>) -> Result<Self> {
        Self::from_factors(
            y,
            self.x.clone(),
            self.controls.clone(),
            self.cluster.clone(),
            self.subcluster.clone(),
        )
    }

    /// Copy with outcome and regressor replaced.
    pub fn with_outcome_and_regressor(&self, y: Vec<f64>, x: Vec<f64>) -> Result<Self> {
        Self::from_factors(
            y,
            x,
            self.controls.clone(),
            self.cluster.clone(),
            self.subcluster.clone(),
        )
    }
}

fn check_nesting(cluster: &Factor, subcluster: &Factor) -> Result<()> {
    let mut parent: Vec<Option<u32>> = vec![None; subcluster.levels().len()];
    for (&s, &c) in subcluster.codes().iter().zip(cluster.codes()) {
        match parent[s as usize] {
            None => parent[s as usize] = Some(c),
            Some(p) if p != c => {
                return Err(Error::Nesting {
                    subcluster: subcluster.levels()[s as usize].clone(),
                    first: cluster.levels()[p as usize].clone(),
                    second: cluster.levels()[c as usize].clone(),
                })
            }
            Some(_) => {}
        }
    }
    Ok(())
}

/// Column roles and CSV dialect for [`load_dataset`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaSpec {
    pub outcome: String,
    pub regressor: String,
    pub controls: Vec<String>,
    pub cluster: String,
    pub subcluster: String,
    pub delimiter: u8,
    pub has_header: bool,
}

impl SchemaSpec {
    pub fn new(
        outcome: impl Into<String>,
        regressor: impl Into<String>,
        controls: Vec<String>,
        cluster: impl Into<String>,
        subcluster: impl Into<String>,
    ) -> Self {
        SchemaSpec {
            outcome: outcome.into(),
            regressor: regressor.into(),
            controls,
            cluster: cluster.into(),
            subcluster: subcluster.into(),
            delimiter: b',',
            has_header: true,
        }
    }

    fn roles(&self) -> Vec<&str> {
        let mut roles = vec![self.outcome.as_str(), self.regressor.as_str()];
        roles.extend(self.controls.iter().map(String::as_str));
        roles.push(&self.cluster);
        roles.push(&self.subcluster);
        roles
    }

    fn validate(&self) -> Result<()> {
        let roles = self.roles();
        for (i, a) in roles.iter().enumerate() {
            if roles[..i].contains(a) {
                return Err(Error::DuplicateColumn {
                    column: a.to_string(),
                });
            }
        }
        Ok(())
    }
}

/// Reads a delimited file into a [`Dataset`].
///
/// Without a header row, column names are the 1-based positions `"1"`, `"2"`, ...
/// Row numbers in errors are 1-based data rows (the header is not counted).
pub fn load_dataset(path: impl AsRef<Path>, schema: &SchemaSpec) -> Result<Dataset> {
    let file = File::open(path)?;
    read_dataset(file, schema)
}

pub fn read_dataset<R: Read>(reader: R, schema: &SchemaSpec) -> Result<Dataset> {
    schema.validate()?;
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(schema.delimiter)
        .has_headers(schema.has_header)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let header: Vec<String> = if schema.has_header {
        rdr.headers()?.iter().map(str::to_string).collect()
    } else {
        Vec::new()
    };
    let locate = |name: &str, width: usize| -> Result<usize> {
        if schema.has_header {
            header.iter().position(|h| h == name)
        } else {
            name.parse::<usize>()
                .ok()
                .filter(|&p| p >= 1 && p <= width)
                .map(|p| p - 1)
        }
        .ok_or_else(|| Error::MissingColumn {
            column: name.to_string(),
        })
    };

    let mut records = rdr.records().peekable();
    let width = if schema.has_header {
        header.len()
    } else {
        match records.peek() {
            Some(Ok(r)) => r.len(),
            _ => 0,
        }
    };
    let y_col = locate(&schema.outcome, width)?;
    let x_col = locate(&schema.regressor, width)?;
    let w_cols = schema
        .controls
        .iter()
        .map(|c| locate(c, width))
        .collect::<Result<Vec<_>>>()?;
    let k_col = locate(&schema.cluster, width)?;
    let j_col = locate(&schema.subcluster, width)?;

    let mut y = Vec::new();
    let mut x = Vec::new();
    let mut w: Vec<Vec<f64>> = vec![Vec::new(); w_cols.len()];
    let mut clusters = Vec::new();
    let mut subclusters = Vec::new();

    for (row, rec) in records.enumerate() {
        let rec = rec?;
        let row = row + 1;
        let num = |col: usize, name: &str| -> Result<f64> {
            let raw = rec.get(col).unwrap_or("");
            raw.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse {
                    row,
                    column: name.to_string(),
                    value: raw.to_string(),
                })
        };
        let label = |col: usize, name: &str| -> Result<String> {
            match rec.get(col) {
                Some(s) if !s.is_empty() => Ok(s.to_string()),
                other => Err(Error::Parse {
                    row,
                    column: name.to_string(),
                    value: other.unwrap_or("").to_string(),
                }),
            }
        };
        y.push(num(y_col, &schema.outcome)?);
        x.push(num(x_col, &schema.regressor)?);
        for ((col, name), dst) in w_cols.iter().zip(&schema.controls).zip(w.iter_mut()) {
            dst.push(num(*col, name)?);
        }
        clusters.push(label(k_col, &schema.cluster)?);
        subclusters.push(label(j_col, &schema.subcluster)?);
    }

    Dataset::new(y, x, w, &clusters, &subclusters)
}

/// Writes a dataset with the column names of `schema`. Floats are written in
/// shortest round-trip form, so reloading reproduces every value bit for bit.
pub fn write_dataset<W: Write>(ds: &Dataset, schema: &SchemaSpec, out: W) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new()
        .delimiter(schema.delimiter)
        .from_writer(out);
    if schema.controls.len() != ds.d() {
        return Err(Error::Invalid(format!(
            "schema names {} controls but dataset has {}",
            schema.controls.len(),
            ds.d()
        )));
    }
    if schema.has_header {
        wtr.write_record(schema.roles())?;
    }
    for i in 0..ds.n() {
        let mut rec = vec![ds.y[i].to_string(), ds.x[i].to_string()];
        rec.extend(ds.controls.iter().map(|c| c[i].to_string()));
        rec.push(ds.cluster.label(i).to_string());
        rec.push(ds.subcluster.label(i).to_string());
        wtr.write_record(&rec)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Nesting map k → {j} → {i} with deterministic (label-sorted) orderings.
///
/// Sub-clusters are numbered globally `0..q`, cluster by cluster, so that the
/// sub-clusters of cluster `k` occupy the contiguous range
/// [`ClusterLayout::subclusters_of`]`(k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterLayout {
    clusters: Vec<String>,
    subclusters: Vec<String>,
    cluster_of_sub: Vec<usize>,
    sub_ranges: Vec<Range<usize>>,
    members: Vec<Vec<usize>>,
    sub_of_obs: Vec<usize>,
}

impl ClusterLayout {
    pub fn r(&self) -> usize {
        self.clusters.len()
    }

    pub fn q(&self) -> usize {
        self.subclusters.len()
    }

    pub fn n(&self) -> usize {
        self.sub_of_obs.len()
    }

    pub fn clusters(&self) -> &[String] {
        &self.clusters
    }

    pub fn subclusters(&self) -> &[String] {
        &self.subclusters
    }

    pub fn subclusters_of(&self, k: usize) -> Range<usize> {
        self.sub_ranges[k].clone()
    }

    pub fn q_k(&self, k: usize) -> usize {
        self.sub_ranges[k].len()
    }

    pub fn cluster_of(&self, j: usize) -> usize {
        self.cluster_of_sub[j]
    }

    /// Observation indices of sub-cluster `j`, in dataset order.
    pub fn members_of(&self, j: usize) -> &[usize] {
        &self.members[j]
    }

    pub fn n_j(&self, j: usize) -> usize {
        self.members[j].len()
    }

    /// Sub-cluster index of every observation.
    pub fn subcluster_of_obs(&self) -> &[usize] {
        &self.sub_of_obs
    }

    /// Observation indices of cluster `k`, sub-cluster by sub-cluster.
    pub fn cluster_members(&self, k: usize) -> Vec<usize> {
        self.subclusters_of(k)
            .flat_map(|j| self.members[j].iter().copied())
            .collect()
    }
}

impl ClusterLayout {
    /// Layout with `q_k[k]` sub-clusters in cluster `k`, each holding `n_j`
    /// observations laid out cluster by cluster. Labels are `K01`, `K01-J01`, ...
    pub fn synthetic(q_k: &[usize], n_j: usize) -> Self {
        let kw = width(q_k.len());
        let jw = width(q_k.iter().copied().max().unwrap_or(1));
        let mut clusters = Vec::new();
        let mut subclusters = Vec::new();
        let mut cluster_of_sub = Vec::new();
        let mut sub_ranges = Vec::new();
        let mut members = Vec::new();
        let mut sub_of_obs = Vec::new();
        for (k, &qk) in q_k.iter().enumerate() {
            clusters.push(format!("K{:0kw$}", k + 1));
            let start = subclusters.len();
            for j in 0..qk {
                subclusters.push(format!("K{:0kw$}-J{:0jw$}", k + 1, j + 1));
                cluster_of_sub.push(k);
                let idx = subclusters.len() - 1;
                let first = sub_of_obs.len();
                members.push((first..first + n_j).collect());
                sub_of_obs.extend(std::iter::repeat_n(idx, n_j));
            }
            sub_ranges.push(start..subclusters.len());
        }
        ClusterLayout {
            clusters,
            subclusters,
            cluster_of_sub,
            sub_ranges,
            members,
            sub_of_obs,
        }
    }

    /// Sub-cluster index ranges of every cluster.
    pub fn blocks(&self) -> &[Range<usize>] {
        &self.sub_ranges
    }
}

/// Zero-padded label width for `count` items (at least two digits).
pub(crate) fn width(count: usize) -> usize {
    count.to_string().len().max(2)
}

/// Computes the nesting map of a dataset.
pub fn build_layout(ds: &Dataset) -> ClusterLayout {
    let kf = ds.cluster();
    let jf = ds.subcluster();

    let mut korder: Vec<usize> = (0..kf.levels().len()).collect();
    korder.sort_by(|&a, &b| kf.levels()[a].cmp(&kf.levels()[b]));
    let mut krank = vec![0usize; korder.len()];
    for (rank, &code) in korder.iter().enumerate() {
        krank[code] = rank;
    }

    // Every sub-cluster level occurs at least once, so its parent is known.
    let mut parent = vec![0usize; jf.levels().len()];
    for (&s, &c) in jf.codes().iter().zip(kf.codes()) {
        parent[s as usize] = krank[c as usize];
    }
    let mut jorder: Vec<usize> = (0..jf.levels().len()).collect();
    jorder.sort_by(|&a, &b| {
        parent[a]
            .cmp(&parent[b])
            .then_with(|| jf.levels()[a].cmp(&jf.levels()[b]))
    });
    let mut jrank = vec![0usize; jorder.len()];
    for (rank, &code) in jorder.iter().enumerate() {
        jrank[code] = rank;
    }

    let clusters: Vec<String> = korder.iter().map(|&c| kf.levels()[c].clone()).collect();
    let subclusters: Vec<String> = jorder.iter().map(|&c| jf.levels()[c].clone()).collect();
    let cluster_of_sub: Vec<usize> = jorder.iter().map(|&c| parent[c]).collect();

    let mut sub_ranges = vec![0..0; clusters.len()];
    let mut start = 0;
    for (k, range) in sub_ranges.iter_mut().enumerate() {
        let mut end = start;
        while end < cluster_of_sub.len() && cluster_of_sub[end] == k {
            end += 1;
        }
        *range = start..end;
        start = end;
    }

    let mut members = vec![Vec::new(); subclusters.len()];
    let sub_of_obs: Vec<usize> = jf.codes().iter().map(|&c| jrank[c as usize]).collect();
    for (i, &j) in sub_of_obs.iter().enumerate() {
        members[j].push(i);
    }

    ClusterLayout {
        clusters,
        subclusters,
        cluster_of_sub,
        sub_ranges,
        members,
        sub_of_obs,
    }
}
