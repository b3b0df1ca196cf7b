//! `nestfill`: construct nested and sliced arrays, lift them to space-filling
//! designs, verify design files and export them.
//!
//! Exit codes: 0 success, 2 invalid specification, 3 verification failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nestfill::arrays::{
    construct_from_ndm, construct_ndm_kron, construct_noa_bush, construct_noa_kron_multi,
    construct_noa_rh, construct_noa_subfield, construct_soa_kron, rao_hamming_oa, Construction,
    GeneratorMatrix, NestedArray, SlicedArray,
};
use nestfill::format::{format_text_matrix, parse_text_matrix, DesignFile, DesignType, Stage};
use nestfill::groups::{BaseSpec, ChainSpec};
use nestfill::spacefill::{
    build_nsfd, build_ssfd_grouped, build_ssfd_multi, column_rng, compose_qual_quant,
    relabel_grouped, relabel_nested, relabel_sliced, LiftedDesign, NestedPermutation,
    SlicedPermutation, Stratum,
};
use nestfill::{Code, Error, GroupChain, Matrix};

#[derive(Parser)]
#[command(
    name = "nestfill",
    version,
    about = "Nested and sliced orthogonal arrays and space-filling designs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a nested or sliced array.
    Construct(ConstructArgs),
    /// Relabel an array and lift it to a nested or sliced space-filling design.
    Lift(LiftArgs),
    /// Re-check every claim recorded in a design file.
    Verify(VerifyArgs),
    /// Convert a design file to CSV, JSON, element text or scatter data.
    Export(ExportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    RhNoa,
    SubfieldNoa,
    BushNoa,
    NdmProduct,
    KronSoa,
    KronNoa,
    KronNdm,
}

#[derive(Clone, Copy, ValueEnum)]
enum Layout {
    Monomial,
    Subfield,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    /// The nested family (default).
    Nested,
    /// Row blocks of the top array collapsing under one projection.
    Sliced,
    /// The difference matrix of an ndm-product construction.
    Dm,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FileFormat {
    Json,
    Csv,
    Text,
    Scatter,
}

#[derive(Args)]
struct ChainArgs {
    /// Characteristic of a field tower.
    #[arg(long)]
    p: Option<u32>,
    /// Degrees u_1 < ... < u_I of a field tower, comma separated.
    #[arg(long, value_delimiter = ',')]
    u: Vec<u32>,
    /// Field tower layout; defaults per method.
    #[arg(long, value_enum)]
    layout: Option<Layout>,
    /// Bases of an ω-ring, e.g. `z6,z2` or `gf4,z3,z2`.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["p", "u"])]
    bases: Vec<String>,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long, value_enum)]
    method: Method,
    #[command(flatten)]
    chain: ChainArgs,
    /// Rows of the full-factorial block (the strength for bush-noa).
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Explicit generator columns, `;` between columns, `,` between entries.
    #[arg(long)]
    columns: Option<String>,
    /// Input arrays: A_1..A_I for kron-noa, A_2 then A_1 for kron-soa,
    /// D_1..D_I for kron-ndm, A for ndm-product.
    #[arg(long = "input")]
    inputs: Vec<PathBuf>,
    /// Claimed strength of Kronecker-sum inputs.
    #[arg(long, default_value_t = 2)]
    t: usize,
    #[arg(long, value_enum, default_value_t = Emit::Nested)]
    emit: Emit,
    /// Slices of `|A_i|` rows when emitting a sliced array.
    #[arg(long)]
    slice_layer: Option<usize>,
    /// Chain layer `j` of the collapsing projection when emitting a sliced array.
    #[arg(long)]
    projection: Option<usize>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum)]
    format: Option<FileFormat>,
    /// Where to write the verification report (JSON); stdout otherwise.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DesignKind {
    /// Nested space-filling design from a nested array.
    Nsfd,
    /// Sliced design for every layer at once, from a nested array.
    SsfdMulti,
    /// Sliced design for one partition, from a sliced array.
    SsfdGrouped,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StageArg {
    RelabelOnly,
    Full,
}

#[derive(Args)]
struct LiftArgs {
    /// Array file produced by `construct`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    design: DesignKind,
    /// One permutation per column, `,` separated; repeat the flag per column.
    #[arg(long = "perm")]
    perms: Vec<String>,
    /// Seed for drawing permutations not given explicitly (defaults to --seed).
    #[arg(long)]
    perm_seed: Option<u64>,
    /// Seed for the Latin hypercube expansion.
    #[arg(long, env = "NESTFILL_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = StageArg::Full)]
    stage: StageArg,
    /// Group order for ssfd-grouped, as element text forms.
    #[arg(long, value_delimiter = ',')]
    group_order: Vec<String>,
    /// Qualitative array whose run `l` is appended to slice `l`.
    #[arg(long)]
    qualitative: Option<PathBuf>,
    /// Slice size used when appending qualitative runs.
    #[arg(long)]
    qualitative_slice: Option<usize>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum)]
    format: Option<FileFormat>,
}

#[derive(Args)]
struct VerifyArgs {
    file: PathBuf,
    /// Where to write the JSON report; stdout otherwise.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    file: PathBuf,
    #[arg(long, value_enum)]
    format: FileFormat,
    /// Output file, or a directory for scatter data.
    #[arg(long)]
    out: PathBuf,
}

/// Failure classes mapped onto exit codes.
enum Failure {
    Spec(anyhow::Error),
    Verification(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast_ref::<Error>() {
            Some(Error::Verification(r)) => Failure::Verification(r.to_string()),
            _ => Failure::Spec(e),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::from(anyhow::Error::from(e))
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Construct(a) => cmd_construct(a),
        Command::Lift(a) => cmd_lift(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Export(a) => cmd_export(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Spec(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(3)
        }
    }
}

fn parse_base(token: &str) -> anyhow::Result<BaseSpec> {
    let t = token.trim().to_ascii_lowercase();
    if let Some(n) = t.strip_prefix('z') {
        return Ok(BaseSpec::Zn(
            n.parse()
                .with_context(|| format!("bad cyclic base {token:?}"))?,
        ));
    }
    if let Some(q) = t.strip_prefix("gf") {
        let q: u32 = q
            .parse()
            .with_context(|| format!("bad field base {token:?}"))?;
        let p = (2..=q)
            .find(|d| q.is_multiple_of(*d))
            .ok_or_else(|| anyhow!("bad field order {q}"))?;
        let mut u = 0;
        let mut rest = q;
        while rest.is_multiple_of(p) {
            rest /= p;
            u += 1;
        }
        if rest != 1 {
            bail!("{q} is not a prime power");
        }
        return Ok(BaseSpec::Gf {
            p,
            u,
            modulus: None,
        });
    }
    bail!("unknown base {token:?}; use zN or gfQ")
}

fn chain_spec(args: &ChainArgs, default_layout: Layout) -> anyhow::Result<ChainSpec> {
    if !args.bases.is_empty() {
        let bases = args
            .bases
            .iter()
            .map(|b| parse_base(b))
            .collect::<anyhow::Result<_>>()?;
        return Ok(ChainSpec::Omega { bases });
    }
    let p = args
        .p
        .ok_or_else(|| anyhow!("give --p and --u for a field tower, or --bases for an ω-ring"))?;
    if args.u.is_empty() {
        bail!("--u is required with --p");
    }
    let u_chain = args.u.clone();
    Ok(match args.layout.unwrap_or(default_layout) {
        Layout::Monomial => ChainSpec::Field {
            p,
            u_chain,
            modulus: None,
        },
        Layout::Subfield => ChainSpec::Subfield {
            p,
            u_chain,
            modulus: None,
        },
    })
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_design(path: &Path) -> anyhow::Result<DesignFile> {
    let text = read(path)?;
    let file = if text.trim_start().starts_with('{') {
        DesignFile::from_json(&text)?
    } else {
        DesignFile::from_csv(&text)?
    };
    Ok(file)
}

/// A design file's rows, or whitespace-separated element text.
fn read_matrix(chain: &GroupChain, path: &Path) -> anyhow::Result<Matrix> {
    let text = read(path)?;
    if text.trim_start().starts_with('{') {
        return Ok(DesignFile::from_json(&text)?.matrix()?);
    }
    parse_text_matrix(chain, &text).with_context(|| format!("parsing {}", path.display()))
}

/// A design file's rows, or whitespace-separated integer levels.
fn read_levels(path: &Path) -> anyhow::Result<Matrix> {
    let text = read(path)?;
    if text.trim_start().starts_with('{') {
        return Ok(DesignFile::from_json(&text)?.matrix()?);
    }
    let rows = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.split_whitespace()
                .map(|v| {
                    v.parse::<Code>()
                        .with_context(|| format!("bad level {v:?} in {}", path.display()))
                })
                .collect::<anyhow::Result<Vec<_>>>()
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok(Matrix::from_rows(&rows)?)
}

fn pick_format(explicit: Option<FileFormat>, out: &Path) -> FileFormat {
    explicit.unwrap_or_else(|| match out.extension().and_then(|e| e.to_str()) {
        Some("csv") => FileFormat::Csv,
        Some("txt") => FileFormat::Text,
        _ => FileFormat::Json,
    })
}

fn write(path: &Path, contents: &str) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

/// Writes `file` after re-verifying it from its serialized form.
fn emit(file: &DesignFile, out: &Path, format: FileFormat, report: Option<&Path>) -> CmdResult {
    let report_value = file.verify()?;
    let json = serde_json::to_string_pretty(&report_value).expect("reports serialize");
    match report {
        Some(p) => write(p, &format!("{json}\n"))?,
        None => println!("{json}"),
    }
    if !report_value.passed {
        return Err(Failure::Verification(report_value.to_string()));
    }
    export(file, out, format)?;
    Ok(())
}

fn export(file: &DesignFile, out: &Path, format: FileFormat) -> anyhow::Result<()> {
    match format {
        FileFormat::Json => write(out, &file.to_json()),
        FileFormat::Csv => write(out, &file.to_csv()?),
        FileFormat::Text => {
            let m = file.matrix()?;
            let text = match file.build_chain()? {
                Some(chain) if file.symbols.is_some() => format_text_matrix(&chain, &m),
                _ => m
                    .row_iter()
                    .map(|r| r.iter().map(u32::to_string).collect::<Vec<_>>().join(" ") + "\n")
                    .collect(),
            };
            write(out, &text)
        }
        FileFormat::Scatter => {
            let files = file.scatter()?;
            fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
            for (name, contents) in files {
                write(&out.join(name), &contents)?;
            }
            Ok(())
        }
    }
}

fn parse_columns(chain: &GroupChain, text: &str) -> anyhow::Result<Vec<Vec<Code>>> {
    text.split(';')
        .map(|col| {
            col.split(',')
                .map(|c| chain.parse(c.trim()).map_err(anyhow::Error::from))
                .collect()
        })
        .collect()
}

fn nested_file(nested: &NestedArray, method: &str) -> anyhow::Result<DesignFile> {
    let prefixes = nested
        .layer_prefixes()
        .ok_or_else(|| anyhow!("the layers are not row prefixes of the top array"))?;
    let design_type = match nested.kind {
        nestfill::arrays::ArrayKind::Oa => DesignType::Noa,
        nestfill::arrays::ArrayKind::Dm => DesignType::Ndm,
    };
    let top_layer = *nested.projection_layers.last().unwrap();
    let mut f =
        DesignFile::new(design_type, method, nested.top()).with_chain(&nested.chain, top_layer);
    f.t_claimed = Some(nested.strength);
    f.layer_prefixes = Some(prefixes);
    f.projection_layers = Some(nested.projection_layers.clone());
    Ok(f)
}

fn sliced_file(sliced: &SlicedArray, method: &str) -> DesignFile {
    let design_type = match sliced.kind {
        nestfill::arrays::ArrayKind::Oa => DesignType::Soa,
        nestfill::arrays::ArrayKind::Dm => DesignType::Sdm,
    };
    let chain = &sliced.chain;
    let mut f = DesignFile::new(design_type, method, &sliced.top).with_chain(chain, chain.layers());
    f.t_claimed = Some(sliced.strength);
    f.slice_size = Some(sliced.slice_size);
    f.projection_layer = Some(sliced.projection_layer);
    f
}

fn pick_sliced<'a>(
    sliced: &'a [SlicedArray],
    family: &NestedArray,
    a: &ConstructArgs,
) -> anyhow::Result<&'a SlicedArray> {
    let i = a
        .slice_layer
        .ok_or_else(|| anyhow!("--emit sliced needs --slice-layer"))?;
    let j = a.projection.unwrap_or(i);
    let size = family
        .layers
        .get(i.wrapping_sub(1))
        .ok_or_else(|| anyhow!("--slice-layer {i} is out of range"))?
        .rows();
    sliced
        .iter()
        .find(|s| s.slice_size == size && s.projection_layer == j)
        .ok_or_else(|| anyhow!("no sliced structure with slices of layer {i} under projection {j} (need j <= i < I)"))
}

fn construction_file(
    out: &Construction,
    a: &ConstructArgs,
    method: &str,
) -> anyhow::Result<DesignFile> {
    match a.emit {
        Emit::Nested => nested_file(&out.nested, method),
        Emit::Sliced => Ok(sliced_file(
            pick_sliced(&out.sliced, &out.nested, a)?,
            method,
        )),
        Emit::Dm => bail!("--emit dm applies to ndm-product only"),
    }
}

fn cmd_construct(a: ConstructArgs) -> CmdResult {
    let default_layout = match a.method {
        Method::RhNoa => Layout::Monomial,
        _ => Layout::Subfield,
    };
    let spec = chain_spec(&a.chain, default_layout)?;
    let chain = spec.build()?;
    let method = match a.method {
        Method::RhNoa => "rh-noa",
        Method::SubfieldNoa => "subfield-noa",
        Method::BushNoa => "bush-noa",
        Method::NdmProduct => "ndm-product",
        Method::KronSoa => "kron-soa",
        Method::KronNoa => "kron-noa",
        Method::KronNdm => "kron-ndm",
    };
    let generator = match &a.columns {
        Some(text) => {
            let scalars: Vec<Code> = match a.method {
                Method::RhNoa => {
                    (0..chain.field().map(|f| f.characteristic()).unwrap_or(0)).collect()
                }
                _ => chain.members(1),
            };
            Some(GeneratorMatrix::with_columns(
                &scalars,
                a.k,
                parse_columns(&chain, text)?,
            )?)
        }
        None => None,
    };
    let inputs = || -> anyhow::Result<Vec<Matrix>> {
        a.inputs.iter().map(|p| read_matrix(&chain, p)).collect()
    };
    let file = match a.method {
        Method::RhNoa => construction_file(
            &construct_noa_rh(&chain, a.k, generator.as_ref())?,
            &a,
            method,
        )?,
        Method::SubfieldNoa => construction_file(
            &construct_noa_subfield(&chain, a.k, generator.as_ref())?,
            &a,
            method,
        )?,
        Method::BushNoa => construction_file(&construct_noa_bush(&chain, a.k)?, &a, method)?,
        Method::KronNoa => construction_file(
            &construct_noa_kron_multi(&chain, &inputs()?, a.t)?,
            &a,
            method,
        )?,
        Method::KronNdm => construction_file(&construct_ndm_kron(&chain, &inputs()?)?, &a, method)?,
        Method::KronSoa => {
            let m = inputs()?;
            let [a2, a1] = m.as_slice() else {
                return Err(Failure::Spec(anyhow!(
                    "kron-soa takes --input A_2 --input A_1"
                )));
            };
            let out = construct_soa_kron(&chain, a2, a1, a.t)?;
            match a.emit {
                Emit::Sliced | Emit::Nested => sliced_file(&out.sliced, method),
                Emit::Dm => {
                    return Err(Failure::Spec(anyhow!(
                        "--emit dm applies to ndm-product only"
                    )))
                }
            }
        }
        Method::NdmProduct => {
            let base = match a.inputs.as_slice() {
                [] => {
                    let field = chain
                        .field()
                        .ok_or_else(|| anyhow!("ndm-product needs a field tower"))?;
                    rao_hamming_oa(field, a.k)?
                }
                [p] => read_matrix(&chain, p)?,
                _ => {
                    return Err(Failure::Spec(anyhow!(
                        "ndm-product takes at most one --input"
                    )))
                }
            };
            let out = construct_from_ndm(&chain, &base)?;
            match a.emit {
                Emit::Dm => nested_file(&out.ndm, method)?,
                Emit::Nested => {
                    // D outermost, so that each A ⊕ D(1:s_i) is a row prefix.
                    let blocks = out
                        .d
                        .row_iter()
                        .map(|d| shift_rows(&chain, &base, d))
                        .collect::<nestfill::Result<Vec<_>>>()?;
                    let top = Matrix::vstack(&blocks)?;
                    let layers = (1..=chain.layers())
                        .map(|i| top.slice_rows(0, base.rows() * chain.layer_order(i)))
                        .collect::<nestfill::Result<Vec<_>>>()?;
                    let nested = NestedArray {
                        chain: chain.clone(),
                        layers,
                        projection_layers: (1..=chain.layers()).collect(),
                        kind: nestfill::arrays::ArrayKind::Oa,
                        strength: 2,
                    };
                    nested_file(&nested, method)?
                }
                Emit::Sliced => {
                    let j = a
                        .projection
                        .ok_or_else(|| anyhow!("--emit sliced needs --projection"))?;
                    let s = out
                        .sliced
                        .iter()
                        .find(|s| s.projection_layer == j)
                        .ok_or_else(|| anyhow!("no sliced structure under projection {j}"))?;
                    sliced_file(s, method)
                }
            }
        }
    };
    emit(
        &file,
        &a.out,
        pick_format(a.format, &a.out),
        a.report.as_deref(),
    )
}

/// `A + 1 d'`: every row of `a` shifted by the row vector `d`.
fn shift_rows(chain: &GroupChain, a: &Matrix, d: &[Code]) -> nestfill::Result<Matrix> {
    use nestfill::AdditiveGroup;
    let rows: Vec<Vec<Code>> = a
        .row_iter()
        .map(|r| r.iter().zip(d).map(|(&x, &y)| chain.add(x, y)).collect())
        .collect();
    Matrix::from_rows(&rows)
}

fn parse_perm(text: &str) -> anyhow::Result<Vec<u32>> {
    text.split(',')
        .map(|v| {
            v.trim()
                .parse::<u32>()
                .with_context(|| format!("bad permutation entry {v:?}"))
        })
        .collect()
}

fn cmd_lift(a: LiftArgs) -> CmdResult {
    let input = read_design(&a.input)?;
    let chain = input
        .build_chain()?
        .ok_or_else(|| anyhow!("the input file records no chain"))?;
    let top = input.matrix()?;
    let layers: Vec<usize> = chain.layer_orders().to_vec();
    let s_top = *layers.last().unwrap();
    let perm_seed = a.perm_seed.unwrap_or(a.seed);
    let explicit: Vec<Vec<u32>> = a
        .perms
        .iter()
        .map(|p| parse_perm(p))
        .collect::<anyhow::Result<_>>()?;
    if !explicit.is_empty() && explicit.len() != top.cols() {
        return Err(Failure::Spec(anyhow!(
            "{} permutations for {} columns",
            explicit.len(),
            top.cols()
        )));
    }
    let perm_values = |nested: bool| -> anyhow::Result<Vec<Vec<u32>>> {
        if !explicit.is_empty() {
            return Ok(explicit.clone());
        }
        (0..top.cols())
            .map(|l| {
                let mut rng = column_rng(perm_seed, l);
                Ok(if nested {
                    NestedPermutation::generate(&layers, &mut rng)?
                        .values()
                        .to_vec()
                } else {
                    SlicedPermutation::generate(&layers, &mut rng)?
                        .values()
                        .to_vec()
                })
            })
            .collect()
    };
    let prefixes = || -> anyhow::Result<Vec<usize>> {
        if input.design_type != DesignType::Noa {
            bail!("nsfd and ssfd-multi lifting need a nested array (type noa)");
        }
        input
            .layer_prefixes
            .clone()
            .ok_or_else(|| anyhow!("the input records no layer_prefixes"))
    };
    let nested_array = |prefixes: &[usize]| -> anyhow::Result<NestedArray> {
        Ok(NestedArray {
            chain: chain.clone(),
            layers: prefixes
                .iter()
                .map(|&r| top.slice_rows(0, r))
                .collect::<nestfill::Result<_>>()?,
            projection_layers: (1..=chain.layers()).collect(),
            kind: nestfill::arrays::ArrayKind::Oa,
            strength: input.t_claimed.unwrap_or(2),
        })
    };

    let mut file;
    let relabel_only = a.stage == StageArg::RelabelOnly;
    let mut used_perms = None;
    let slice_size;
    match a.design {
        DesignKind::Nsfd => {
            let prefixes = prefixes()?;
            let values = perm_values(true)?;
            let perms = values
                .iter()
                .map(|v| NestedPermutation::new(v.clone(), &layers))
                .collect::<nestfill::Result<Vec<_>>>()?;
            let strata: Vec<Stratum> = prefixes
                .iter()
                .zip(&layers)
                .map(|(&rows, &grid)| Stratum {
                    rows,
                    grid,
                    prefix_only: true,
                })
                .collect();
            let lifted = if relabel_only {
                relabeled_only(relabel_nested(&chain, &top, &perms)?, s_top, strata)
            } else {
                build_nsfd(&nested_array(&prefixes)?, &perms, a.seed)?
            };
            file = lifted_file(&lifted, DesignType::Nsfd, "nsfd", relabel_only);
            file.layer_prefixes = Some(prefixes);
            used_perms = Some(values);
            slice_size = None;
        }
        DesignKind::SsfdMulti => {
            let prefixes = prefixes()?;
            let values = perm_values(false)?;
            let perms = values
                .iter()
                .map(|v| SlicedPermutation::new(v.clone(), &layers))
                .collect::<nestfill::Result<Vec<_>>>()?;
            let lifted = if relabel_only {
                let mut strata = Vec::new();
                for (i, &rows) in prefixes.iter().enumerate() {
                    for &grid in &layers[..=i] {
                        strata.push(Stratum {
                            rows,
                            grid,
                            prefix_only: false,
                        });
                    }
                }
                relabeled_only(relabel_sliced(&chain, &top, &perms)?, s_top, strata)
            } else {
                build_ssfd_multi(&nested_array(&prefixes)?, &perms, a.seed)?
            };
            file = lifted_file(&lifted, DesignType::Ssfd, "ssfd-multi", relabel_only);
            file.layer_prefixes = Some(prefixes.clone());
            used_perms = Some(values);
            slice_size = Some(prefixes[0]);
        }
        DesignKind::SsfdGrouped => {
            if input.design_type != DesignType::Soa {
                return Err(Failure::Spec(anyhow!(
                    "ssfd-grouped lifting needs a sliced array (type soa)"
                )));
            }
            let size = input
                .slice_size
                .ok_or_else(|| anyhow!("the input records no slice_size"))?;
            let j = input
                .projection_layer
                .ok_or_else(|| anyhow!("the input records no projection_layer"))?;
            let order: Vec<Code> = a
                .group_order
                .iter()
                .map(|t| chain.parse(t.trim()))
                .collect::<nestfill::Result<_>>()?;
            let order = (!order.is_empty()).then_some(order.as_slice());
            let soa = SlicedArray {
                chain: chain.clone(),
                top: top.clone(),
                slice_size: size,
                projection_layer: j,
                kind: nestfill::arrays::ArrayKind::Oa,
                strength: input.t_claimed.unwrap_or(2),
            };
            let lifted = if relabel_only {
                let strata = vec![
                    Stratum {
                        rows: size,
                        grid: chain.layer_order(j),
                        prefix_only: false,
                    },
                    Stratum {
                        rows: top.rows(),
                        grid: s_top,
                        prefix_only: false,
                    },
                ];
                relabeled_only(relabel_grouped(&chain, &top, j, order)?, s_top, strata)
            } else {
                build_ssfd_grouped(&soa, order, a.seed)?
            };
            file = lifted_file(&lifted, DesignType::Ssfd, "ssfd-grouped", relabel_only);
            file.projection_layer = Some(j);
            slice_size = Some(size);
        }
    }
    file.chain = Some(chain.spec());
    file.s = s_top;
    file.t_claimed = Some(2);
    file.slice_size = slice_size;
    if !relabel_only {
        file.seeds.insert("lift".into(), a.seed);
    }
    if let Some(values) = used_perms {
        if a.perms.is_empty() {
            file.seeds.insert("permutations".into(), perm_seed);
            file.permutation_seeds = Some(vec![perm_seed]);
        }
        file.permutations = Some(values);
    }
    if let Some(path) = &a.qualitative {
        let qual = read_levels(path)?;
        let size = a
            .qualitative_slice
            .or(slice_size)
            .ok_or_else(|| anyhow!("--qualitative needs --qualitative-slice"))?;
        let design = file.matrix()?;
        let combined = compose_qual_quant(&design, size, &qual)?;
        let mut merged = DesignFile::new(file.design_type, file.method.clone(), &combined);
        merged.quantitative_columns = Some(design.cols());
        merged.slice_size = Some(size);
        file = DesignFile {
            n: merged.n,
            m: merged.m,
            rows: merged.rows,
            quantitative_columns: merged.quantitative_columns,
            slice_size: merged.slice_size,
            ..file
        };
    }
    emit(&file, &a.out, pick_format(a.format, &a.out), None)
}

fn relabeled_only(relabeled: Matrix, levels: usize, strata: Vec<Stratum>) -> LiftedDesign {
    LiftedDesign {
        design: relabeled.clone(),
        relabeled,
        levels,
        strata,
        seed: 0,
    }
}

fn lifted_file(
    d: &LiftedDesign,
    design_type: DesignType,
    method: &str,
    relabel_only: bool,
) -> DesignFile {
    let mut f = DesignFile::new(design_type, method, &d.design);
    f.stage = Some(if relabel_only {
        Stage::Relabeled
    } else {
        Stage::Lifted
    });
    f.strata = Some(d.strata.clone());
    f
}

fn cmd_verify(a: VerifyArgs) -> CmdResult {
    let file = read_design(&a.file)?;
    let report = file.verify()?;
    let out = serde_json::json!({
        "file": a.file.display().to_string(),
        "type": file.design_type,
        "method": file.method,
        "passed": report.passed,
        "report": report,
    });
    let text = serde_json::to_string_pretty(&out).expect("reports serialize");
    match &a.report {
        Some(p) => write(p, &format!("{text}\n"))?,
        None => println!("{text}"),
    }
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Verification(report.to_string()))
    }
}

fn cmd_export(a: ExportArgs) -> CmdResult {
    let file = read_design(&a.file)?;
    export(&file, &a.out, a.format)?;
    Ok(())
}
