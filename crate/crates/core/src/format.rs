//! Design files: JSON, CSV with `#` metadata, and per-pair scatter CSVs.
//!
//! A file records everything needed to re-verify and re-create its rows:
//! the chain, the claimed structure, the method and every seed. Rows are
//! integer codes; on input a cell may also be an element's text form.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::arrays::{ArrayKind, NestedArray, SlicedArray};
use crate::error::{Error, Result};
use crate::groups::{ChainSpec, Code, GroupChain};
use crate::matrix::Matrix;
use crate::spacefill::{self, Stratum};
use crate::verify::{self, VerificationReport};

pub const TOOL_VERSION: &str = concat!("nestfill ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DesignType {
    Oa,
    Dm,
    Noa,
    Ndm,
    Soa,
    Sdm,
    Nsfd,
    Ssfd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    /// Integer levels `0..s` before Latin hypercube expansion.
    Relabeled,
    Lifted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Code(Code),
    Text(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignFile {
    #[serde(rename = "type")]
    pub design_type: DesignType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<ChainSpec>,
    /// Chain layer holding the entries.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layer: Option<usize>,
    pub n: usize,
    pub m: usize,
    pub s: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_claimed: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layer_prefixes: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projection_layers: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slice_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projection_layer: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage: Option<Stage>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strata: Option<Vec<Stratum>>,
    /// Leading columns forming the space-filling part; the rest are
    /// qualitative factors appended per slice.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantitative_columns: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permutations: Option<Vec<Vec<u32>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permutation_seeds: Option<Vec<u64>>,
    #[serde(default)]
    pub method: String,
    #[serde(default)]
    pub seeds: BTreeMap<String, u64>,
    #[serde(default)]
    pub tool_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbols: Option<BTreeMap<Code, String>>,
    #[serde(default)]
    pub rows: Vec<Vec<Cell>>,
}

impl DesignFile {
    /// A bare file for `matrix` with `s = max code + 1`.
    pub fn new(design_type: DesignType, method: impl Into<String>, matrix: &Matrix) -> DesignFile {
        DesignFile {
            design_type,
            chain: None,
            layer: None,
            n: matrix.rows(),
            m: matrix.cols(),
            s: matrix.max_code() as usize + 1,
            t_claimed: None,
            layer_prefixes: None,
            projection_layers: None,
            slice_size: None,
            projection_layer: None,
            stage: None,
            strata: None,
            quantitative_columns: None,
            permutations: None,
            permutation_seeds: None,
            method: method.into(),
            seeds: BTreeMap::new(),
            tool_version: TOOL_VERSION.to_string(),
            symbols: None,
            rows: matrix
                .row_iter()
                .map(|r| r.iter().map(|&c| Cell::Code(c)).collect())
                .collect(),
        }
    }

    /// Records `chain`, sets `s = |F_layer|` and adds a symbol table for the
    /// codes that occur.
    pub fn with_chain(mut self, chain: &GroupChain, layer: usize) -> DesignFile {
        self.chain = Some(chain.spec());
        self.layer = Some(layer);
        self.s = chain.layer_order(layer);
        let symbols = self
            .rows
            .iter()
            .flatten()
            .filter_map(|c| match c {
                Cell::Code(c) => Some((*c, chain.format(*c))),
                Cell::Text(_) => None,
            })
            .collect();
        self.symbols = Some(symbols);
        self
    }

    pub fn build_chain(&self) -> Result<Option<GroupChain>> {
        self.chain.as_ref().map(ChainSpec::build).transpose()
    }

    fn require_chain(&self) -> Result<GroupChain> {
        self.build_chain()?.ok_or_else(|| {
            Error::parse(
                "design file",
                format!("a {:?} file needs a chain", self.design_type),
            )
        })
    }

    /// The rows as codes, resolving text cells through the chain.
    pub fn matrix(&self) -> Result<Matrix> {
        if self.rows.is_empty() {
            return Err(Error::Shape("the design has no rows".into()));
        }
        let chain = self.build_chain()?;
        let rows =
            self.rows
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|cell| match (cell, &chain) {
                            (Cell::Code(c), _) => Ok(*c),
                            (Cell::Text(t), Some(chain)) => chain.parse(t),
                            (Cell::Text(t), None) => t.trim().parse().map_err(|_| {
                                Error::parse(t, "text cells need a chain to be resolved")
                            }),
                        })
                        .collect::<Result<Vec<Code>>>()
                })
                .collect::<Result<Vec<_>>>()?;
        let m = Matrix::from_rows(&rows)?;
        if m.rows() != self.n || m.cols() != self.m {
            return Err(Error::Shape(format!(
                "header claims {}x{}, rows give {}x{}",
                self.n,
                self.m,
                m.rows(),
                m.cols()
            )));
        }
        Ok(m)
    }

    /// Re-checks every claim in the file with the brute-force oracles.
    pub fn verify(&self) -> Result<VerificationReport> {
        let a = self.matrix()?;
        let t = self.t_claimed.unwrap_or(2);
        let missing = |field: &str| {
            Error::parse(
                "design file",
                format!("a {:?} file needs `{field}`", self.design_type),
            )
        };
        let kind = match self.design_type {
            DesignType::Dm | DesignType::Ndm | DesignType::Sdm => ArrayKind::Dm,
            _ => ArrayKind::Oa,
        };
        Ok(match self.design_type {
            DesignType::Oa => verify::check_oa_strength(&a, self.s, t),
            DesignType::Dm => {
                let chain = self.require_chain()?;
                let layer = self.layer.unwrap_or(chain.layers());
                chain.check_layer(layer)?;
                verify::check_difference_matrix(&a, chain.radix().radices(), &chain.members(layer))
            }
            DesignType::Noa | DesignType::Ndm => {
                let chain = self.require_chain()?;
                let prefixes = self
                    .layer_prefixes
                    .clone()
                    .ok_or_else(|| missing("layer_prefixes"))?;
                let projection_layers = self
                    .projection_layers
                    .clone()
                    .unwrap_or_else(|| (1..=prefixes.len()).collect());
                if projection_layers.len() != prefixes.len() {
                    return Err(Error::Shape("one projection layer per nested layer".into()));
                }
                for &j in &projection_layers {
                    chain.check_layer(j)?;
                }
                let layers = prefixes
                    .iter()
                    .map(|&r| a.slice_rows(0, r))
                    .collect::<Result<Vec<_>>>()?;
                NestedArray {
                    chain,
                    layers,
                    projection_layers,
                    kind,
                    strength: t,
                }
                .verify()
            }
            DesignType::Soa | DesignType::Sdm => {
                let chain = self.require_chain()?;
                let slice_size = self.slice_size.ok_or_else(|| missing("slice_size"))?;
                let projection_layer = self
                    .projection_layer
                    .ok_or_else(|| missing("projection_layer"))?;
                chain.check_layer(projection_layer)?;
                if slice_size == 0 || a.rows() % slice_size != 0 {
                    return Err(Error::Shape(format!(
                        "slices of {slice_size} rows do not tile {}",
                        a.rows()
                    )));
                }
                SlicedArray {
                    chain,
                    top: a,
                    slice_size,
                    projection_layer,
                    kind,
                    strength: t,
                }
                .verify()
            }
            DesignType::Nsfd | DesignType::Ssfd => {
                let strata = self.strata.as_ref().ok_or_else(|| missing("strata"))?;
                let a = match self.quantitative_columns {
                    Some(q) if q == 0 || q > a.cols() => {
                        return Err(Error::Shape(format!(
                            "{q} quantitative columns out of {}",
                            a.cols()
                        )))
                    }
                    Some(q) => {
                        let rows: Vec<Vec<Code>> = a.row_iter().map(|r| r[..q].to_vec()).collect();
                        Matrix::from_rows(&rows)?
                    }
                    None => a,
                };
                match self.stage.unwrap_or(Stage::Lifted) {
                    Stage::Relabeled => spacefill::check_strata(&a, self.s, strata),
                    Stage::Lifted => {
                        let lh = verify::check_latin_hypercube(&a);
                        if !lh.passed {
                            return Ok(lh);
                        }
                        spacefill::check_strata(&a, a.rows(), strata)
                    }
                }
            }
        })
    }

    /// Pretty-printed metadata with one line per run.
    pub fn to_json(&self) -> String {
        let meta = serde_json::to_string_pretty(&self.metadata()).expect("design files serialize");
        let head = meta
            .strip_suffix("\n  \"rows\": []\n}")
            .expect("rows serialize last");
        let rows: Vec<String> = self
            .rows
            .iter()
            .map(|r| format!("    {}", serde_json::to_string(r).expect("rows serialize")))
            .collect();
        format!("{head}\n  \"rows\": [\n{}\n  ]\n}}\n", rows.join(",\n"))
    }

    pub fn from_json(text: &str) -> Result<DesignFile> {
        serde_json::from_str(text).map_err(|e| Error::parse("design JSON", e.to_string()))
    }

    fn metadata(&self) -> DesignFile {
        DesignFile {
            rows: Vec::new(),
            ..self.clone()
        }
    }

    /// Metadata in `#` comment lines (the last one machine-readable), then
    /// a header `x1..xm` and one line of codes per run.
    pub fn to_csv(&self) -> Result<String> {
        let a = self.matrix()?;
        let mut out = String::new();
        writeln!(
            out,
            "# type: {}",
            serde_json::to_string(&self.design_type)
                .unwrap()
                .trim_matches('"')
        )
        .unwrap();
        writeln!(out, "# method: {}", self.method).unwrap();
        writeln!(out, "# n: {}, m: {}, s: {}", self.n, self.m, self.s).unwrap();
        for (purpose, seed) in &self.seeds {
            writeln!(out, "# seed {purpose}: {seed}").unwrap();
        }
        writeln!(
            out,
            "# meta {}",
            serde_json::to_string(&self.metadata()).unwrap()
        )
        .unwrap();
        let header: Vec<String> = (1..=a.cols()).map(|c| format!("x{c}")).collect();
        writeln!(out, "{}", header.join(",")).unwrap();
        for row in a.row_iter() {
            let cells: Vec<String> = row.iter().map(u32::to_string).collect();
            writeln!(out, "{}", cells.join(",")).unwrap();
        }
        Ok(out)
    }

    /// Reads [`DesignFile::to_csv`] output; without a `# meta` line the rows
    /// are taken as a plain array.
    pub fn from_csv(text: &str) -> Result<DesignFile> {
        let mut meta = None;
        let mut rows = Vec::new();
        let mut header_seen = false;
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(json) = comment.trim().strip_prefix("meta ") {
                    meta = Some(Self::from_json(json)?);
                }
                continue;
            }
            if !header_seen {
                header_seen = true;
                if line.split(',').all(|h| h.trim().starts_with('x')) {
                    continue;
                }
            }
            let row = line
                .split(',')
                .map(|c| {
                    let c = c.trim();
                    c.parse::<Code>()
                        .map(Cell::Code)
                        .or_else(|_| Ok(Cell::Text(c.to_string())))
                })
                .collect::<Result<Vec<Cell>>>()?;
            rows.push(row);
        }
        let mut file = match meta {
            Some(m) => m,
            None => {
                let codes: Vec<Vec<Code>> = rows
                    .iter()
                    .map(|r| {
                        r.iter()
                            .map(|c| match c {
                                Cell::Code(c) => Ok(*c),
                                Cell::Text(t) => {
                                    Err(Error::parse(t, "CSV without metadata must hold codes"))
                                }
                            })
                            .collect()
                    })
                    .collect::<Result<_>>()?;
                DesignFile::new(DesignType::Oa, "csv", &Matrix::from_rows(&codes)?)
            }
        };
        file.rows = rows;
        file.matrix()?;
        Ok(file)
    }

    /// One `(file name, CSV)` per column pair `i < j`, each listing the
    /// design's points projected onto those two dimensions.
    pub fn scatter(&self) -> Result<Vec<(String, String)>> {
        let a = self.matrix()?;
        if a.cols() < 2 {
            return Err(Error::Shape(
                "scatter data needs at least two columns".into(),
            ));
        }
        let mut files = Vec::new();
        for i in 0..a.cols() {
            for j in i + 1..a.cols() {
                let mut out = format!("x{},x{}\n", i + 1, j + 1);
                for row in a.row_iter() {
                    writeln!(out, "{},{}", row[i], row[j]).unwrap();
                }
                files.push((format!("pair_x{}_x{}.csv", i + 1, j + 1), out));
            }
        }
        Ok(files)
    }
}

/// Whitespace-separated element text forms, one run per line; blank lines
/// and `#` comments are skipped.
pub fn parse_text_matrix(chain: &GroupChain, text: &str) -> Result<Matrix> {
    let rows = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.split_whitespace()
                .map(|c| chain.parse(c))
                .collect::<Result<Vec<Code>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(&rows)
}

/// Inverse of [`parse_text_matrix`].
pub fn format_text_matrix(chain: &GroupChain, m: &Matrix) -> String {
    let mut out = String::new();
    for row in m.row_iter() {
        let cells: Vec<String> = row.iter().map(|&c| chain.format(c)).collect();
        writeln!(out, "{}", cells.join(" ")).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrays::construct_noa_rh;

    fn binary() -> GroupChain {
        GroupChain::field_tower(2, &[1, 2, 3], None).unwrap()
    }

    fn noa_file() -> DesignFile {
        let chain = binary();
        let out = construct_noa_rh(&chain, 2, None).unwrap();
        let mut f = DesignFile::new(DesignType::Noa, "rh-noa", out.top()).with_chain(&chain, 3);
        f.t_claimed = Some(2);
        f.layer_prefixes = out.nested.layer_prefixes();
        f
    }

    #[test]
    fn json_and_csv_round_trip() {
        let f = noa_file();
        assert_eq!(f.s, 8);
        assert_eq!(f.symbols.as_ref().unwrap()[&6], "x^2+x");
        let back = DesignFile::from_json(&f.to_json()).unwrap();
        assert_eq!(back, f);
        let csv = f.to_csv().unwrap();
        assert!(csv.lines().any(|l| l == "x1,x2,x3"));
        let again = DesignFile::from_csv(&csv).unwrap();
        assert_eq!(again.matrix().unwrap(), f.matrix().unwrap());
        assert_eq!(again.layer_prefixes, f.layer_prefixes);
        assert!(again.verify().unwrap().passed);
    }

    #[test]
    fn text_cells_resolve_through_chain() {
        let mut f = noa_file();
        f.rows[1] = vec![
            Cell::Text("0".into()),
            Cell::Text("x".into()),
            Cell::Text("x".into()),
        ];
        assert_eq!(f.matrix().unwrap().row(1), &[0, 2, 2]);
        f.chain = None;
        assert!(f.matrix().is_err());
    }

    #[test]
    fn verify_catches_tampering() {
        let mut f = noa_file();
        assert!(f.verify().unwrap().passed);
        f.rows[0][0] = Cell::Code(1);
        assert!(!f.verify().unwrap().passed);
        f.layer_prefixes = None;
        assert!(f.verify().is_err());
    }

    #[test]
    fn csv_without_metadata() {
        let f = DesignFile::from_csv("0,0\n0,1\n1,0\n1,1\n").unwrap();
        assert_eq!(f.n, 4);
        assert!(f.verify().unwrap().passed);
        assert!(DesignFile::from_csv("# only comments\nx1,x2\n").is_err());
    }

    #[test]
    fn scatter_pairs() {
        let files = noa_file().scatter().unwrap();
        assert_eq!(files.len(), 3);
        assert_eq!(files[2].0, "pair_x2_x3.csv");
        assert_eq!(files[0].1.lines().count(), 65);
    }

    #[test]
    fn text_matrix_round_trip() {
        let chain = binary();
        let m = parse_text_matrix(&chain, "# header\n0 x x^2+1\n\n1 0 x^2\n").unwrap();
        assert_eq!(m.to_rows(), vec![vec![0, 2, 5], vec![1, 0, 4]]);
        assert_eq!(
            parse_text_matrix(&chain, &format_text_matrix(&chain, &m)).unwrap(),
            m
        );
    }
}
