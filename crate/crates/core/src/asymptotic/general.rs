//! Two-stage codes for arbitrary inputs on `X^n`: pick a type from `C′`
//! uniformly, then a codeword uniformly from that type's codebook.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::fixed::{build_fixed_type_code, FixedTypeCode, FixedTypeParams, FixedTypeReport};
use super::source::{build_type_code, source_size, TypeCode};
use super::{mixture_output, type_distribution, word_weights, TypeDistribution};
use crate::codebook::{parse_header, Codebook};
use crate::error::{Error, Result};
use crate::hedge::check_epsilon;
use crate::prob::{tv_slices, Alphabet, Budget, Channel, Distribution};
use crate::singleshot::CodeSize;
use crate::types::{enumerate_types, TypeClass};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralParams {
    pub epsilon: f64,
    pub epsilon_prime: f64,
    pub tau: f64,
    pub tau_prime: f64,
    pub alpha: f64,
    /// Length of the type code `C′`.
    pub type_size: CodeSize,
    /// Length of every per-type codebook.
    pub size: CodeSize,
    pub budget: Budget,
}

/// A type code `C′` plus one codebook over `X^n` for every type in it.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoStageCode {
    n: usize,
    input: Alphabet,
    types: Vec<TypeClass>,
    type_code: Codebook,
    per_type: BTreeMap<usize, Codebook>,
    pub params: Vec<(String, f64)>,
}

impl TwoStageCode {
    pub fn new(
        input: Alphabet,
        n: usize,
        type_code: Codebook,
        per_type: BTreeMap<usize, Codebook>,
        params: Vec<(String, f64)>,
        budget: Budget,
    ) -> Result<Self> {
        let types = enumerate_types(&input, n)?;
        let sequences = input.power(n, budget)?;
        if type_code.alphabet().len() != types.len() {
            return Err(Error::AlphabetMismatch("type code is not over the types of X^n".into()));
        }
        for &t in type_code.words() {
            let c = per_type
                .get(&t)
                .ok_or_else(|| Error::Format(format!("no codebook for type {}", types[t].label())))?;
            c.alphabet().ensure_same(&sequences, "per-type codebook")?;
        }
        // The text form carries no type-code metadata, so none is kept.
        let type_code = Codebook::new(type_code.alphabet().clone(), type_code.words().to_vec())?;
        Ok(TwoStageCode {
            n,
            input,
            types,
            type_code,
            per_type,
            params,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn type_code(&self) -> &Codebook {
        &self.type_code
    }

    /// Codebook for the type with index `t`, if `t` appears in `C′`.
    pub fn per_type(&self, t: usize) -> Option<&Codebook> {
        self.per_type.get(&t)
    }

    pub fn types(&self) -> &[TypeClass] {
        &self.types
    }

    /// `Σ_T L_T` over the distinct types of `C′`.
    pub fn exact_size(&self) -> usize {
        self.per_type.values().map(Codebook::len).sum()
    }

    /// `L′ · max_T L_T`.
    pub fn product_size(&self) -> usize {
        self.type_code.len() * self.per_type.values().map(Codebook::len).max().unwrap_or(0)
    }

    /// The input distribution on `X^n` induced by the two-stage draw.
    pub fn induced_input(&self) -> Vec<(usize, f64)> {
        let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
        for (t, wt) in word_weights(self.type_code.words()) {
            for (x, wx) in word_weights(self.per_type[&t].words()) {
                *acc.entry(x).or_insert(0.0) += wt * wx;
            }
        }
        acc.into_iter().collect()
    }

    /// `(1/L′) Σ_l W_{C^{T_l}}` over `Y^n`.
    pub fn output(&self, w: &Channel, budget: Budget) -> Result<Distribution> {
        w.input().ensure_same(&self.input, "two-stage code input")?;
        let outputs = w.output().power(self.n, budget)?;
        let mut out = vec![0.0; outputs.len()];
        for (t, wt) in word_weights(self.type_code.words()) {
            let words = self.per_type[&t].words();
            let part = mixture_output(w, self.n, word_weights(words), budget)?;
            for (o, v) in out.iter_mut().zip(part) {
                *o += wt * v;
            }
        }
        Distribution::new(outputs, out)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        write!(out, "two_stage n {} L_prime {}", self.n, self.type_code.len()).unwrap();
        for (k, v) in &self.params {
            write!(out, " {k} {v}").unwrap();
        }
        out.push('\n');
        for &t in self.type_code.words() {
            out.push_str(&self.types[t].label());
            out.push('\n');
        }
        writeln!(out, "per_type {}", self.per_type.len()).unwrap();
        for (&t, c) in &self.per_type {
            writeln!(out, "type {}", self.types[t].label()).unwrap();
            out.push_str(&c.to_text());
        }
        out
    }

    /// Parses [`Self::to_text`] output for the base input alphabet `input`.
    pub fn from_text(input: &Alphabet, text: &str, budget: Budget) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let mut next = |what: &str| {
            lines
                .next()
                .ok_or_else(|| Error::Format(format!("unexpected end of input, expected {what}")))
        };
        let header: Vec<&str> = next("header")?.split_whitespace().collect();
        if header.first() != Some(&"two_stage") || header.len() % 2 != 1 {
            return Err(Error::Format(
                "header must start with two_stage and hold key/value pairs".into(),
            ));
        }
        let mut n = None;
        let mut l_prime = None;
        let mut params = Vec::new();
        for pair in header[1..].chunks(2) {
            let bad = |e: &dyn std::fmt::Display| Error::Format(format!("{}: {e}", pair[0]));
            match pair[0] {
                "n" => n = Some(pair[1].parse::<usize>().map_err(|e| bad(&e))?),
                "L_prime" => l_prime = Some(pair[1].parse::<usize>().map_err(|e| bad(&e))?),
                key => params.push((key.to_string(), pair[1].parse::<f64>().map_err(|e| bad(&e))?)),
            }
        }
        let n = n.ok_or_else(|| Error::Format("header lacks n".into()))?;
        let l_prime = l_prime.ok_or_else(|| Error::Format("header lacks L_prime".into()))?;
        let types = enumerate_types(input, n)?;
        let type_alphabet = Alphabet::new(types.iter().map(TypeClass::label))?;
        let sequences = input.power(n, budget)?;

        let mut type_words = Vec::with_capacity(l_prime);
        for _ in 0..l_prime {
            type_words.push(type_alphabet.index_of(next("type")?.trim())?);
        }
        let count_line = next("per_type")?;
        let count = match count_line.split_whitespace().collect::<Vec<_>>()[..] {
            ["per_type", k] => k
                .parse::<usize>()
                .map_err(|e| Error::Format(format!("per_type: {e}")))?,
            _ => return Err(Error::Format(format!("expected per_type line, got {count_line:?}"))),
        };
        let mut per_type = BTreeMap::new();
        for _ in 0..count {
            let type_line = next("type line")?;
            let label = type_line
                .strip_prefix("type ")
                .ok_or_else(|| Error::Format(format!("expected type line, got {type_line:?}")))?;
            let t = type_alphabet.index_of(label.trim())?;
            let head = next("codebook header")?;
            let (len, _) = parse_header(head)?;
            let mut block = String::from(head);
            block.push('\n');
            for _ in 0..len {
                block.push_str(next("codeword")?);
                block.push('\n');
            }
            per_type.insert(t, Codebook::from_text(sequences.clone(), &block)?);
        }
        let type_code = Codebook::new(type_alphabet, type_words)?;
        Self::new(input.clone(), n, type_code, per_type, params, budget)
    }
}

/// Measured quantities of a two-stage construction.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralReport {
    pub n: usize,
    pub num_types: usize,
    pub type_code_len: usize,
    pub distinct_types: usize,
    pub exact_size: usize,
    pub product_size: usize,
    /// Exact `d_var(W_{P_n}, W_{C_n})`.
    pub tv: f64,
    /// `2ε + τ + δ + 2ε′ + τ′`.
    pub bound: f64,
    /// Largest non-typical mass over the types of `C′`.
    pub delta: f64,
    /// `d_var(P_T, R_{C′})`.
    pub type_tv: f64,
    /// `Σ_T P_T(T) d_var(W_{P_n^T}, Q_T)`, with `Q_T = W_{C^T}` for types
    /// in `C′` and `W_{P_n^T}` otherwise.
    pub weighted_tv: f64,
    /// `weighted_tv + type_tv`; dominates `tv`.
    pub triangle_rhs: f64,
    pub max_d_max: f64,
    /// Number of types whose codebook had to use the full mask.
    pub fallback_types: usize,
    /// `max_T L_T · (n+1)^{|X|} |X| ln(n+1) / (τ′ ε′²)` with `L_T` the
    /// per-type size formulas.
    pub size_formula: f64,
    /// `⌈|T| ln|T| / (τ′ ε′²)⌉`.
    pub type_size_formula: usize,
}

#[derive(Debug, Clone)]
pub struct GeneralCode {
    pub code: TwoStageCode,
    pub type_distribution: TypeDistribution,
    pub type_code: TypeCode,
    pub per_type: BTreeMap<usize, FixedTypeCode>,
    pub report: GeneralReport,
}

impl GeneralCode {
    pub fn fixed_reports(&self) -> impl Iterator<Item = &FixedTypeReport> {
        self.per_type.values().map(|c| &c.report)
    }
}

/// Builds `C′` over the type distribution of `p_n`, then a fixed-type code
/// for every type that appears in it, and evaluates the result exactly.
pub fn build_general_code(p_n: &Distribution, w: &Channel, params: GeneralParams) -> Result<GeneralCode> {
    check_epsilon(params.epsilon)?;
    check_epsilon(params.epsilon_prime)?;
    let td = type_distribution(p_n)?;
    let n = td.n();
    let (base, _) = td.sequences().as_power().expect("type distribution lives on X^n");
    base.ensure_same(w.input(), "general code input")?;

    let type_code = build_type_code(td.mass(), params.epsilon_prime, params.tau_prime, params.type_size)?;
    let fixed = FixedTypeParams {
        alpha: params.alpha,
        tau: params.tau,
        epsilon: params.epsilon,
        size: params.size,
        budget: params.budget,
    };
    let mut per_type = BTreeMap::new();
    for &t in type_code.words() {
        if per_type.contains_key(&t) {
            continue;
        }
        let cond = td.conditional(t).expect("types in C′ carry positive mass");
        per_type.insert(t, build_fixed_type_code(&td.types()[t], cond, w, fixed)?);
    }

    // Hybrid Q_T: the per-type code output where one exists, the type's
    // own target elsewhere.
    let outputs = w.output().power(n, params.budget)?;
    let mut target = vec![0.0; outputs.len()];
    let mut weighted_tv = 0.0;
    for (t, _) in td.types().iter().enumerate() {
        let pt = td.mass().get(t);
        let Some(cond) = td.conditional(t) else { continue };
        let part = match per_type.get(&t) {
            Some(code) => {
                weighted_tv += pt * code.report.tv;
                code.construction.target()
            }
            None => mixture_output(
                w,
                n,
                td.members(t).iter().copied().zip(cond.mass().iter().copied()),
                params.budget,
            )?,
        };
        for (o, v) in target.iter_mut().zip(part) {
            *o += pt * v;
        }
    }
    let mut produced = vec![0.0; outputs.len()];
    for (t, wt) in word_weights(type_code.words()) {
        for (o, v) in produced.iter_mut().zip(per_type[&t].construction.output()) {
            *o += wt * v;
        }
    }
    let tv = tv_slices(&target, &produced);
    let type_tv = type_code.tv();

    let delta = per_type
        .values()
        .filter(|c| !c.report.fallback)
        .map(|c| c.report.nontypical_mass)
        .fold(0.0, f64::max);
    let bound = 2.0 * params.epsilon + params.tau + delta + type_code.bound();
    let code = TwoStageCode::new(
        base.clone(),
        n,
        type_code.construction.codebook.clone(),
        per_type.iter().map(|(&t, c)| (t, c.codebook.clone())).collect(),
        vec![
            ("epsilon".into(), params.epsilon),
            ("epsilon_prime".into(), params.epsilon_prime),
            ("tau".into(), params.tau),
            ("tau_prime".into(), params.tau_prime),
            ("alpha".into(), params.alpha),
        ],
        params.budget,
    )?;
    let num_types = td.types().len();
    let k = base.len() as f64;
    let n1 = (n + 1) as f64;
    let max_fixed = per_type.values().map(|c| c.report.size_formula).fold(0.0, f64::max);
    let ep = params.epsilon_prime;
    let report = GeneralReport {
        n,
        num_types,
        type_code_len: type_code.len(),
        distinct_types: per_type.len(),
        exact_size: code.exact_size(),
        product_size: code.product_size(),
        tv,
        bound,
        delta,
        type_tv,
        weighted_tv,
        triangle_rhs: weighted_tv + type_tv,
        max_d_max: per_type.values().map(|c| c.report.d_max).fold(0.0, f64::max),
        fallback_types: per_type.values().filter(|c| c.report.fallback).count(),
        size_formula: max_fixed * n1.powf(k) * k * n1.ln() / (params.tau_prime * ep * ep),
        type_size_formula: source_size(num_types, params.tau_prime, ep)?,
    };
    Ok(GeneralCode {
        code,
        type_distribution: td,
        type_code,
        per_type,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::channel_output;
    use crate::singleshot::{build_codebook, BOUND_TOL};
    use crate::SupportMask;

    fn bits() -> Alphabet {
        Alphabet::numeric(2).unwrap()
    }

    fn params() -> GeneralParams {
        GeneralParams {
            epsilon: 0.25,
            epsilon_prime: 0.25,
            tau: 0.1,
            tau_prime: 0.1,
            alpha: 0.2,
            type_size: CodeSize::Auto,
            size: CodeSize::Auto,
            budget: Budget::DEFAULT,
        }
    }

    fn iid_uniform(n: usize) -> Distribution {
        let seqs = bits().power(n, Budget::DEFAULT).unwrap();
        Distribution::uniform(bits()).iid_power(&seqs).unwrap()
    }

    #[test]
    fn bsc_uniform_within_bound() {
        let w = Channel::bsc(0.1).unwrap();
        let g = build_general_code(&iid_uniform(4), &w, params()).unwrap();
        let r = &g.report;
        assert!(r.tv <= r.bound + BOUND_TOL);
        assert!(r.tv <= r.triangle_rhs + BOUND_TOL);
        let direct = g.code.output(&w, Budget::DEFAULT).unwrap();
        let target = channel_output(
            &iid_uniform(4),
            &crate::product_channel(&w, 4, Budget::DEFAULT).unwrap(),
        )
        .unwrap();
        let tv = tv_slices(direct.mass(), target.mass());
        assert!((tv - r.tv).abs() < 1e-12);
    }

    #[test]
    fn single_type_input() {
        let w = Channel::bsc(0.1).unwrap();
        let seqs = bits().power(2, Budget::DEFAULT).unwrap();
        let p = Distribution::new(seqs, vec![0.0, 0.5, 0.5, 0.0]).unwrap();
        let g = build_general_code(&p, &w, params()).unwrap();
        assert_eq!(g.report.type_tv, 0.0);
        assert_eq!(g.report.distinct_types, 1);
        let only = g.per_type.values().next().unwrap();
        assert!((g.report.tv - only.report.tv).abs() < 1e-12);
    }

    #[test]
    fn block_length_one_matches_single_shot() {
        let w = Channel::bsc(0.1).unwrap();
        let p = iid_uniform(1);
        let g = build_general_code(&p, &w, params()).unwrap();
        assert!(g.report.tv <= g.report.bound + BOUND_TOL);
        let direct = build_codebook(
            &Distribution::uniform(bits()),
            &w,
            &SupportMask::full(bits(), bits()),
            0.25,
            CodeSize::Auto,
        )
        .unwrap();
        assert!(direct.tv() <= 0.5 + BOUND_TOL);
        assert!(g.report.tv <= direct.bound() + g.report.type_tv + BOUND_TOL);
    }

    #[test]
    fn text_round_trip() {
        let w = Channel::bsc(0.1).unwrap();
        let g = build_general_code(&iid_uniform(3), &w, params()).unwrap();
        let text = g.code.to_text();
        let back = TwoStageCode::from_text(&bits(), &text, Budget::DEFAULT).unwrap();
        assert_eq!(back, g.code);
        assert!(TwoStageCode::from_text(&bits(), "two_stage n 3\n", Budget::DEFAULT).is_err());
    }

    #[test]
    fn induced_input_sums_to_one() {
        let w = Channel::bsc(0.1).unwrap();
        let g = build_general_code(&iid_uniform(3), &w, params()).unwrap();
        let total: f64 = g.code.induced_input().iter().map(|&(_, q)| q).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}
