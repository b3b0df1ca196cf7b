//! Group towers `F_1 ⊂ F_2 ⊂ ... ⊂ F_I`, their transversal decomposition and
//! the subgroup projections `ρ_i`.
//!
//! Every group handled here is, additively, a product of cyclic groups, so
//! elements are stored as mixed-radix integer codes over the top group `F_I`
//! and addition is digit-wise. Two families of towers are supported:
//!
//! * field towers inside `GF(p^u_I)`, either the monomial layout
//!   (`F_i` = polynomials of degree below `u_i`) or the subfield layout
//!   (`F_1` a genuine subfield, each `F_i` closed under `F_1`-scaling);
//! * ω-rings `ψ_0 + ψ_1 ω + ... + ψ_{I-1} ω^{I-1}` over arbitrary base groups
//!   `Z_n` or `GF(p^u)`.
//!
//! For a tower with transversals `T_1 = F_1, T_2, ..., T_I` each `γ ∈ F_I`
//! splits uniquely as `β_1 + ... + β_I` with `β_i ∈ T_i`, and
//! `ρ_i(γ) = β_1 + ... + β_i`.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::galois::Field;

/// Canonical integer code of a group element.
pub type Code = u32;

/// Abelian group addition on codes.
pub trait AdditiveGroup {
    fn order(&self) -> usize;
    fn add(&self, a: Code, b: Code) -> Code;
    fn neg(&self, a: Code) -> Code;

    fn sub(&self, a: Code, b: Code) -> Code {
        self.add(a, self.neg(b))
    }

    fn contains(&self, a: Code) -> bool {
        (a as usize) < self.order()
    }
}

/// `Z_{r_0} × Z_{r_1} × ...` with codes `d_0 + r_0 (d_1 + r_1 (...))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Radix {
    radices: Vec<u32>,
    order: usize,
}

impl Radix {
    pub fn new(radices: Vec<u32>) -> Radix {
        let order = radices.iter().map(|&r| r as usize).product();
        Radix { radices, order }
    }

    pub fn radices(&self) -> &[u32] {
        &self.radices
    }
}

impl AdditiveGroup for Radix {
    fn order(&self) -> usize {
        self.order
    }

    fn add(&self, mut a: Code, mut b: Code) -> Code {
        let mut out = 0;
        let mut place = 1;
        for &r in &self.radices {
            out += ((a % r + b % r) % r) * place;
            a /= r;
            b /= r;
            place *= r;
        }
        out
    }

    fn neg(&self, mut a: Code) -> Code {
        let mut out = 0;
        let mut place = 1;
        for &r in &self.radices {
            out += ((r - a % r) % r) * place;
            a /= r;
            place *= r;
        }
        out
    }
}

/// A base group `Ψ` of an ω-ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BaseGroup {
    Cyclic(u32),
    Field(Field),
}

impl BaseGroup {
    pub fn order(&self) -> u32 {
        match self {
            BaseGroup::Cyclic(n) => *n,
            BaseGroup::Field(f) => f.order(),
        }
    }

    fn radices(&self) -> Vec<u32> {
        match self {
            BaseGroup::Cyclic(n) => vec![*n],
            BaseGroup::Field(f) => vec![f.characteristic(); f.degree() as usize],
        }
    }

    fn format(&self, code: Code) -> String {
        match self {
            BaseGroup::Cyclic(_) => code.to_string(),
            BaseGroup::Field(f) => f.format_code(code),
        }
    }

    fn parse(&self, text: &str) -> Result<Code> {
        match self {
            BaseGroup::Cyclic(n) => {
                let mut sum = 0u64;
                for term in text.split('+') {
                    let v: u64 = term
                        .trim()
                        .parse()
                        .map_err(|_| Error::parse(text, "expected an integer in Z_n"))?;
                    sum = (sum + v) % *n as u64;
                }
                Ok(sum as Code)
            }
            BaseGroup::Field(f) => f.parse_code(text),
        }
    }
}

/// How a field tower lays out its layers inside `GF(p^u_I)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TowerLayout {
    Monomial,
    Subfield,
}

#[derive(Clone, Debug)]
pub enum ChainKind {
    FieldTower {
        field: Field,
        layout: TowerLayout,
        degrees: Vec<u32>,
    },
    OmegaRing {
        bases: Vec<BaseGroup>,
    },
}

/// Enumeration order of `F_I` as a Kronecker sum of transversals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Nesting {
    /// `V_{T_1} ⊕ V_{T_2} ⊕ ... ⊕ V_{T_I}`: `T_1` varies slowest.
    InnerFirst,
    /// `V_{T_I} ⊕ ... ⊕ V_{T_1}`: `T_I` varies slowest.
    OuterFirst,
}

/// A tower of groups with a fixed transversal decomposition.
#[derive(Clone, Debug)]
pub struct GroupChain {
    kind: ChainKind,
    radix: Radix,
    /// `|F_i|` for i = 1..=I.
    sizes: Vec<usize>,
    transversals: Vec<Vec<Code>>,
    /// `projections[i][γ] = ρ_{i+1}(γ)`.
    projections: Vec<Vec<Code>>,
    /// Smallest 0-based layer containing each element.
    min_layer: Vec<u8>,
}

impl GroupChain {
    /// Monomial field tower: `F_i` holds the polynomials of degree below `u_i`
    /// and `T_i` is spanned by the monomials `x^{u_{i-1}}, ..., x^{u_i - 1}`.
    pub fn field_tower(p: u32, u_chain: &[u32], modulus: Option<&[u32]>) -> Result<GroupChain> {
        check_increasing(u_chain)?;
        let top = *u_chain.last().unwrap();
        let field = Field::new(p, top, modulus)?;
        let mut transversals = Vec::with_capacity(u_chain.len());
        let mut prev = 0u32;
        for &u in u_chain {
            let base = p.pow(prev);
            let span = p.pow(u - prev);
            transversals.push((0..span).map(|c| c * base).collect());
            prev = u;
        }
        let radix = Radix::new(vec![p; top as usize]);
        let kind = ChainKind::FieldTower {
            field,
            layout: TowerLayout::Monomial,
            degrees: u_chain.to_vec(),
        };
        GroupChain::from_transversals(kind, radix, transversals)
    }

    /// Subfield tower: `F_1 = GF(p^{u_1})` as a genuine subfield of
    /// `GF(p^{u_I})` and every `F_i` an `F_1`-subspace of dimension
    /// `u_i / u_1`. `F_i` is the subfield `GF(p^{u_i})` whenever that subfield
    /// contains `F_{i-1}`; otherwise `F_{i-1}` is extended by the smallest
    /// codes outside it. Transversals are the `F_1`-spans of the elements
    /// picked greedily (smallest code first) to complete `F_{i-1}` to `F_i`.
    pub fn subfield_tower(p: u32, u_chain: &[u32], modulus: Option<&[u32]>) -> Result<GroupChain> {
        check_increasing(u_chain)?;
        let u1 = u_chain[0];
        if let Some(&bad) = u_chain.iter().find(|&&u| u % u1 != 0) {
            return Err(Error::InvalidChain(format!(
                "u_1 = {u1} must divide every u_i, but not {bad}"
            )));
        }
        let top = *u_chain.last().unwrap();
        let field = Field::new(p, top, modulus)?;
        let scalars = field.subfield(u1)?;
        let span = |generators: &[Code]| -> Vec<Code> {
            let mut set: Vec<Code> = vec![0];
            for &g in generators {
                let mut next = Vec::with_capacity(set.len() * scalars.len());
                for &c in &scalars {
                    let cg = field.mul_codes(c, g);
                    next.extend(set.iter().map(|&e| field.add_codes(e, cg)));
                }
                set = next;
            }
            set.sort_unstable();
            set.dedup();
            set
        };

        let mut transversals = vec![scalars.clone()];
        let mut current = scalars.clone();
        for w in u_chain.windows(2) {
            let (prev_u, u) = (w[0], w[1]);
            let layer: Vec<Code> = if top.is_multiple_of(u) {
                let sub = field.subfield(u)?;
                let subset: HashSet<Code> = sub.iter().copied().collect();
                if current.iter().all(|c| subset.contains(c)) {
                    sub
                } else {
                    greedy_extend(&current, (u - prev_u) / u1, field.order(), &span)
                }
            } else {
                greedy_extend(&current, (u - prev_u) / u1, field.order(), &span)
            };
            // Complement basis, picked in ascending code order.
            let mut basis: Vec<Code> = Vec::new();
            let mut covered: HashSet<Code> = current.iter().copied().collect();
            for &cand in &layer {
                if covered.len() == layer.len() {
                    break;
                }
                if covered.contains(&cand) {
                    continue;
                }
                basis.push(cand);
                let comp = span(&basis);
                covered = current
                    .iter()
                    .flat_map(|&c| comp.iter().map(move |&t| (c, t)))
                    .map(|(c, t)| field.add_codes(c, t))
                    .collect();
            }
            transversals.push(span(&basis));
            current = layer;
        }

        let radix = Radix::new(vec![p; top as usize]);
        let kind = ChainKind::FieldTower {
            field,
            layout: TowerLayout::Subfield,
            degrees: u_chain.to_vec(),
        };
        GroupChain::from_transversals(kind, radix, transversals)
    }

    /// ω-ring tower: `Ω_i = Ψ_i ω^{i-1}`, `F_i = Ω_1 + ... + Ω_i`, `T_i = Ω_i`.
    pub fn omega_ring(bases: Vec<BaseGroup>) -> Result<GroupChain> {
        if bases.is_empty() {
            return Err(Error::InvalidChain(
                "an ω-ring needs at least one base group".into(),
            ));
        }
        if let Some(b) = bases.iter().find(|b| b.order() == 0) {
            return Err(Error::InvalidChain(format!("base group {b:?} is empty")));
        }
        let mut radices = Vec::new();
        let mut transversals = Vec::new();
        let mut place: u64 = 1;
        for b in &bases {
            radices.extend(b.radices());
            transversals.push((0..b.order()).map(|c| (c as u64 * place) as Code).collect());
            place *= b.order() as u64;
            if place > u32::MAX as u64 / 2 {
                return Err(Error::InvalidChain("ω-ring is too large".into()));
            }
        }
        let radix = Radix::new(radices);
        GroupChain::from_transversals(ChainKind::OmegaRing { bases }, radix, transversals)
    }

    fn from_transversals(
        kind: ChainKind,
        radix: Radix,
        transversals: Vec<Vec<Code>>,
    ) -> Result<GroupChain> {
        let layers = transversals.len();
        let order = radix.order();
        let mut projections = vec![vec![0 as Code; order]; layers];
        let mut min_layer = vec![u8::MAX; order];
        let mut members: Vec<Code> = vec![0];
        let mut sizes = Vec::with_capacity(layers);

        for (i, t) in transversals.iter().enumerate() {
            if t.first() != Some(&0) {
                return Err(Error::InvalidChain(format!(
                    "T_{} must start with 0",
                    i + 1
                )));
            }
            let mut next = members.clone();
            for &f in &members {
                for &b in t {
                    let g = radix.add(f, b);
                    if (g as usize) >= order {
                        return Err(Error::InvalidChain(format!(
                            "code {g} outside the top group"
                        )));
                    }
                    if b == 0 && i > 0 {
                        continue;
                    }
                    let slot = g as usize;
                    if min_layer[slot] != u8::MAX {
                        return Err(Error::InvalidChain(format!(
                            "T_{} does not form a direct sum with the lower layers",
                            i + 1
                        )));
                    }
                    min_layer[slot] = i as u8;
                    for (j, proj) in projections.iter_mut().enumerate() {
                        proj[slot] = if j < i { proj[f as usize] } else { g };
                    }
                    if !(b == 0 && i == 0) {
                        next.push(g);
                    }
                }
            }
            next.sort_unstable();
            sizes.push(next.len());
            members = next;
        }
        if members.len() != order {
            return Err(Error::InvalidChain(format!(
                "transversals cover {} of {} elements",
                members.len(),
                order
            )));
        }
        Ok(GroupChain {
            kind,
            radix,
            sizes,
            transversals,
            projections,
            min_layer,
        })
    }

    pub fn kind(&self) -> &ChainKind {
        &self.kind
    }

    /// The top field of a field tower.
    pub fn field(&self) -> Option<&Field> {
        match &self.kind {
            ChainKind::FieldTower { field, .. } => Some(field),
            ChainKind::OmegaRing { .. } => None,
        }
    }

    pub fn layers(&self) -> usize {
        self.sizes.len()
    }

    /// `|F_i|` for 1-based `i`.
    pub fn layer_order(&self, i: usize) -> usize {
        self.sizes[i - 1]
    }

    pub fn layer_orders(&self) -> &[usize] {
        &self.sizes
    }

    pub fn radix(&self) -> &Radix {
        &self.radix
    }

    /// `T_i` in canonical order, 1-based `i`.
    pub fn transversal(&self, i: usize) -> &[Code] {
        &self.transversals[i - 1]
    }

    pub fn check_layer(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.layers() {
            Err(Error::LayerOutOfRange {
                layer: i,
                layers: self.layers(),
            })
        } else {
            Ok(())
        }
    }

    fn check_element(&self, code: Code) -> Result<()> {
        if (code as usize) < self.radix.order() {
            Ok(())
        } else {
            Err(Error::NotInLayer {
                code,
                layer: self.layers(),
            })
        }
    }

    /// Whether `code ∈ F_i`.
    pub fn in_layer(&self, i: usize, code: Code) -> bool {
        (code as usize) < self.radix.order() && (self.min_layer[code as usize] as usize) < i
    }

    /// Elements of `F_i` in ascending code.
    pub fn members(&self, i: usize) -> Vec<Code> {
        (0..self.radix.order() as Code)
            .filter(|&c| self.in_layer(i, c))
            .collect()
    }

    /// The unique `(β_1, ..., β_I)` with `β_i ∈ T_i` summing to `γ`.
    pub fn decompose(&self, gamma: Code) -> Result<Vec<Code>> {
        self.check_element(gamma)?;
        let mut out = Vec::with_capacity(self.layers());
        let mut below = 0;
        for proj in &self.projections {
            let cur = proj[gamma as usize];
            out.push(self.radix.sub(cur, below));
            below = cur;
        }
        Ok(out)
    }

    /// `ρ_i(γ)` for 1-based layer `i`.
    pub fn project(&self, i: usize, gamma: Code) -> Result<Code> {
        self.check_layer(i)?;
        self.check_element(gamma)?;
        Ok(self.projections[i - 1][gamma as usize])
    }

    /// The full lookup table of `ρ_i`, indexed by code.
    pub fn projection_table(&self, i: usize) -> &[Code] {
        &self.projections[i - 1]
    }

    /// `F_I` as a Kronecker sum of the transversals; the first element is 0.
    pub fn enumerate_ordered(&self, nesting: Nesting) -> Vec<Code> {
        let order: Vec<&Vec<Code>> = match nesting {
            Nesting::InnerFirst => self.transversals.iter().collect(),
            Nesting::OuterFirst => self.transversals.iter().rev().collect(),
        };
        let mut out: Vec<Code> = vec![0];
        for t in order {
            out = out
                .iter()
                .flat_map(|&a| t.iter().map(move |&b| (a, b)))
                .map(|(a, b)| self.radix.add(a, b))
                .collect();
        }
        out
    }

    /// Text form of an element.
    pub fn format(&self, code: Code) -> String {
        match &self.kind {
            ChainKind::FieldTower { field, .. } => field.format_code(code),
            ChainKind::OmegaRing { bases } => format_omega(bases, code),
        }
    }

    /// Parses an element's text form.
    pub fn parse(&self, text: &str) -> Result<Code> {
        match &self.kind {
            ChainKind::FieldTower { field, .. } => field.parse_code(text),
            ChainKind::OmegaRing { bases } => parse_omega(bases, text),
        }
    }

    /// Whether every `F_i` is closed under multiplication by `F_1` and `F_1`
    /// itself is a subfield, i.e. the tower can carry generator matrices
    /// over `F_1`.
    pub fn supports_scalars(&self) -> bool {
        let Some(field) = self.field() else {
            return false;
        };
        let f1 = self.members(1);
        let f1_closed = f1
            .iter()
            .all(|&a| f1.iter().all(|&b| self.in_layer(1, field.mul_codes(a, b))));
        if !f1_closed || !f1.contains(&1) {
            return false;
        }
        (2..=self.layers()).all(|i| {
            self.members(i)
                .iter()
                .all(|&g| f1.iter().all(|&c| self.in_layer(i, field.mul_codes(c, g))))
        })
    }

    /// Serializable descriptor that rebuilds this chain.
    pub fn spec(&self) -> ChainSpec {
        match &self.kind {
            ChainKind::FieldTower {
                field,
                layout,
                degrees,
            } => {
                let modulus = Some(field.modulus().to_vec());
                match layout {
                    TowerLayout::Monomial => ChainSpec::Field {
                        p: field.characteristic(),
                        u_chain: degrees.clone(),
                        modulus,
                    },
                    TowerLayout::Subfield => ChainSpec::Subfield {
                        p: field.characteristic(),
                        u_chain: degrees.clone(),
                        modulus,
                    },
                }
            }
            ChainKind::OmegaRing { bases } => ChainSpec::Omega {
                bases: bases
                    .iter()
                    .map(|b| match b {
                        BaseGroup::Cyclic(n) => BaseSpec::Zn(*n),
                        BaseGroup::Field(f) => BaseSpec::Gf {
                            p: f.characteristic(),
                            u: f.degree(),
                            modulus: Some(f.modulus().to_vec()),
                        },
                    })
                    .collect(),
            },
        }
    }
}

impl AdditiveGroup for GroupChain {
    fn order(&self) -> usize {
        self.radix.order()
    }

    fn add(&self, a: Code, b: Code) -> Code {
        self.radix.add(a, b)
    }

    fn neg(&self, a: Code) -> Code {
        self.radix.neg(a)
    }
}

fn check_increasing(u_chain: &[u32]) -> Result<()> {
    if u_chain.is_empty() {
        return Err(Error::InvalidChain("empty degree chain".into()));
    }
    if u_chain[0] == 0 {
        return Err(Error::InvalidChain("degrees must be positive".into()));
    }
    if u_chain.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidChain(format!(
            "degree chain {u_chain:?} is not strictly increasing"
        )));
    }
    Ok(())
}

fn greedy_extend(
    current: &[Code],
    extra_dims: u32,
    order: u32,
    span: &dyn Fn(&[Code]) -> Vec<Code>,
) -> Vec<Code> {
    let mut gens: Vec<Code> = current.iter().copied().filter(|&c| c != 0).collect();
    let mut set: HashSet<Code> = current.iter().copied().collect();
    let mut added = 0;
    for cand in 0..order {
        if added == extra_dims {
            break;
        }
        if set.contains(&cand) {
            continue;
        }
        gens.push(cand);
        set = span(&gens).into_iter().collect();
        added += 1;
    }
    let mut out: Vec<Code> = set.into_iter().collect();
    out.sort_unstable();
    out
}

fn omega_components(bases: &[BaseGroup], mut code: Code) -> Vec<Code> {
    bases
        .iter()
        .map(|b| {
            let c = code % b.order();
            code /= b.order();
            c
        })
        .collect()
}

fn format_omega(bases: &[BaseGroup], code: Code) -> String {
    let comps = omega_components(bases, code);
    let mut terms = Vec::new();
    for (b, (&c, base)) in comps.iter().zip(bases).enumerate() {
        if c == 0 {
            continue;
        }
        let coef = base.format(c);
        if b == 0 {
            terms.push(coef);
            continue;
        }
        let coef = if coef == "1" {
            String::new()
        } else if coef.contains('+') {
            format!("({coef})")
        } else {
            coef
        };
        let power = if b == 1 {
            String::new()
        } else {
            format!("^{b}")
        };
        terms.push(format!("{coef}w{power}"));
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.reverse();
        terms.join("+")
    }
}

/// Splits on `+` outside parentheses.
fn split_terms(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in text.chars() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth -= 1;
                cur.push(ch);
            }
            '+' if depth == 0 => out.push(std::mem::take(&mut cur)),
            _ => cur.push(ch),
        }
    }
    out.push(cur);
    out
}

fn parse_omega(bases: &[BaseGroup], text: &str) -> Result<Code> {
    let compact: String = text
        .chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| if c == 'ω' { 'w' } else { c })
        .collect();
    if compact.is_empty() {
        return Err(Error::parse(text, "empty element"));
    }
    let mut plain: Vec<Vec<String>> = vec![Vec::new(); bases.len()];
    for term in split_terms(&compact) {
        if term.is_empty() {
            return Err(Error::parse(text, "empty term"));
        }
        match term.rfind('w') {
            None => plain[0].push(term),
            Some(pos) => {
                let coef = term[..pos].trim_end_matches('*');
                let rest = &term[pos + 1..];
                let power: usize = if rest.is_empty() {
                    1
                } else {
                    rest.trim_start_matches('^')
                        .parse()
                        .map_err(|_| Error::parse(text, format!("bad ω power in {term:?}")))?
                };
                if power == 0 || power >= bases.len() {
                    return Err(Error::parse(
                        text,
                        format!("ω^{power} is outside this ring"),
                    ));
                }
                let coef = coef
                    .strip_prefix('(')
                    .and_then(|c| c.strip_suffix(')'))
                    .unwrap_or(coef);
                plain[power].push(if coef.is_empty() {
                    "1".into()
                } else {
                    coef.to_string()
                });
            }
        }
    }
    let mut code: u64 = 0;
    let mut place: u64 = 1;
    for (terms, base) in plain.iter().zip(bases) {
        if !terms.is_empty() {
            let c = base.parse(&terms.join("+"))?;
            code += c as u64 * place;
        }
        place *= base.order() as u64;
    }
    Ok(code as Code)
}

/// Configuration-file descriptor of a chain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ChainSpec {
    Field {
        p: u32,
        u_chain: Vec<u32>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        modulus: Option<Vec<u32>>,
    },
    Subfield {
        p: u32,
        u_chain: Vec<u32>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        modulus: Option<Vec<u32>>,
    },
    Omega {
        bases: Vec<BaseSpec>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseSpec {
    Zn(u32),
    Gf {
        p: u32,
        u: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        modulus: Option<Vec<u32>>,
    },
}

impl ChainSpec {
    pub fn build(&self) -> Result<GroupChain> {
        match self {
            ChainSpec::Field {
                p,
                u_chain,
                modulus,
            } => GroupChain::field_tower(*p, u_chain, modulus.as_deref()),
            ChainSpec::Subfield {
                p,
                u_chain,
                modulus,
            } => GroupChain::subfield_tower(*p, u_chain, modulus.as_deref()),
            ChainSpec::Omega { bases } => {
                let bases = bases
                    .iter()
                    .map(|b| match b {
                        BaseSpec::Zn(n) => Ok(BaseGroup::Cyclic(*n)),
                        BaseSpec::Gf { p, u, modulus } => {
                            Ok(BaseGroup::Field(Field::new(*p, *u, modulus.as_deref())?))
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                GroupChain::omega_ring(bases)
            }
        }
    }
}
