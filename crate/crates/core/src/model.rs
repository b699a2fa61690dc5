//! Species, complexes, reactions and networks, plus the plain-text network format.
//!
//! ```text
//! # Example 2
//! species: A1 A2
//! A1 -> A2 ; k = 1
//! 2A2 -> A1 ; k = 1
//! 2A2 -> 3A1 ; k = 0.5
//! A <-> 2A ; kf = 1 ; kr = 1/3
//! ```
//!
//! Terms are `<coefficient>? <name>` joined by `+`; `0` is the empty complex.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_traits::Signed;
use serde::Serialize;

use crate::error::{ModelError, ParseError};
use crate::scalar::parse_rational;
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpeciesTable {
    names: Vec<String>,
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl SpeciesTable {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self, ModelError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(ModelError::NoSpecies);
        }
        for (i, n) in names.iter().enumerate() {
            if !valid_name(n) {
                return Err(ModelError::BadSpeciesName(n.clone()));
            }
            if names[..i].contains(n) {
                return Err(ModelError::DuplicateSpecies(n.clone()));
            }
        }
        Ok(Self { names })
    }

    /// `A1, A2, ..., Am`.
    pub fn numbered(m: usize) -> Self {
        Self {
            names: (1..=m).map(|i| format!("A{i}")).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// Nonnegative integer stoichiometric vector over the species table.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Complex(Vec<u32>);

impl Complex {
    pub fn new(coeffs: Vec<u32>) -> Self {
        Self(coeffs)
    }

    pub fn zero(m: usize) -> Self {
        Self(vec![0; m])
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn molecularity(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `other − self` as signed integers.
    pub fn difference_to(&self, other: &Complex) -> Vec<i64> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| b as i64 - a as i64)
            .collect()
    }

    pub fn permuted(&self, perm: &[usize]) -> Complex {
        Complex(perm.iter().map(|&p| self.0[p]).collect())
    }

    pub fn display<'a>(&'a self, species: &'a SpeciesTable) -> ComplexDisplay<'a> {
        ComplexDisplay { complex: self, species }
    }
}

pub struct ComplexDisplay<'a> {
    complex: &'a Complex,
    species: &'a SpeciesTable,
}

impl fmt::Display for ComplexDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (c, name) in self.complex.0.iter().zip(self.species.names()) {
            if *c == 0 {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            if *c == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{c}{name}")?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reaction {
    pub reactant: Complex,
    pub product: Complex,
    pub rate: Rational,
}

impl Reaction {
    pub fn new(reactant: Complex, product: Complex, rate: Rational) -> Self {
        Self {
            reactant,
            product,
            rate,
        }
    }

    /// `z' − z`.
    pub fn reaction_vector(&self) -> Vec<i64> {
        self.reactant.difference_to(&self.product)
    }
}

/// A validated network with its stoichiometrically distinct complexes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Network {
    species: SpeciesTable,
    reactions: Vec<Reaction>,
    complexes: Vec<Complex>,
    reactant_complexes: Vec<usize>,
    ends: Vec<(usize, usize)>,
}

impl Network {
    pub fn new(species: SpeciesTable, reactions: Vec<Reaction>) -> Result<Self, ModelError> {
        if reactions.is_empty() {
            return Err(ModelError::NoReactions);
        }
        let m = species.len();
        let mut complexes: Vec<Complex> = Vec::new();
        let mut lookup: HashMap<Complex, usize> = HashMap::new();
        let mut ends = Vec::with_capacity(reactions.len());
        let mut is_reactant = Vec::new();
        for (index, rx) in reactions.iter().enumerate() {
            for c in [&rx.reactant, &rx.product] {
                if c.len() != m {
                    return Err(ModelError::DimensionMismatch {
                        expected: m,
                        found: c.len(),
                    });
                }
            }
            if rx.reactant == rx.product {
                return Err(ModelError::TrivialReaction { index });
            }
            if !rx.rate.is_positive() {
                return Err(ModelError::NonPositiveRate { index });
            }
            let mut intern = |c: &Complex| -> usize {
                *lookup.entry(c.clone()).or_insert_with(|| {
                    complexes.push(c.clone());
                    is_reactant.push(false);
                    complexes.len() - 1
                })
            };
            let a = intern(&rx.reactant);
            let b = intern(&rx.product);
            is_reactant[a] = true;
            ends.push((a, b));
        }
        let reactant_complexes = (0..complexes.len()).filter(|&i| is_reactant[i]).collect();
        Ok(Self {
            species,
            reactions,
            complexes,
            reactant_complexes,
            ends,
        })
    }

    pub fn parse(text: &str) -> Result<Self, ModelError> {
        parse_network(text)
    }

    pub fn species(&self) -> &SpeciesTable {
        &self.species
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    /// Stoichiometrically distinct complexes in order of first appearance.
    pub fn complexes(&self) -> &[Complex] {
        &self.complexes
    }

    /// Indices into [`complexes`](Self::complexes) of complexes that appear as a reactant.
    pub fn reactant_complexes(&self) -> &[usize] {
        &self.reactant_complexes
    }

    /// `(reactant index, product index)` into the distinct complexes, per reaction.
    pub fn reaction_ends(&self) -> &[(usize, usize)] {
        &self.ends
    }

    pub fn num_species(&self) -> usize {
        self.species.len()
    }

    pub fn num_reactions(&self) -> usize {
        self.reactions.len()
    }

    pub fn num_complexes(&self) -> usize {
        self.complexes.len()
    }

    pub fn rates(&self) -> Vec<Rational> {
        self.reactions.iter().map(|r| r.rate.clone()).collect()
    }

    /// Same structure with new rate constants (file order).
    pub fn with_rates(&self, rates: &[Rational]) -> Result<Self, ModelError> {
        if rates.len() != self.reactions.len() {
            return Err(ModelError::DimensionMismatch {
                expected: self.reactions.len(),
                found: rates.len(),
            });
        }
        if let Some(index) = rates.iter().position(|k| !k.is_positive()) {
            return Err(ModelError::NonPositiveRate { index });
        }
        let mut out = self.clone();
        for (rx, k) in out.reactions.iter_mut().zip(rates) {
            rx.rate = k.clone();
        }
        Ok(out)
    }

    /// Position of `c` among the distinct complexes.
    pub fn complex_index(&self, c: &Complex) -> Result<Option<usize>, ModelError> {
        if c.len() != self.num_species() {
            return Err(ModelError::DimensionMismatch {
                expected: self.num_species(),
                found: c.len(),
            });
        }
        Ok(self.complexes.iter().position(|x| x == c))
    }

    /// Relabels species so that new species `j` is old species `perm[j]`.
    pub fn permute_species(&self, perm: &[usize]) -> Result<Self, ModelError> {
        let names: Vec<String> = perm.iter().map(|&p| self.species.names()[p].clone()).collect();
        let reactions = self
            .reactions
            .iter()
            .map(|r| Reaction::new(r.reactant.permuted(perm), r.product.permuted(perm), r.rate.clone()))
            .collect();
        Network::new(SpeciesTable::new(names)?, reactions)
    }

    /// Network file text; round-trips through [`Network::parse`].
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Network {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "species: {}", self.species.names().join(" "))?;
        for rx in &self.reactions {
            writeln!(
                f,
                "{} -> {} ; k = {}",
                rx.reactant.display(&self.species),
                rx.product.display(&self.species),
                rx.rate
            )?;
        }
        Ok(())
    }
}

impl FromStr for Network {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_network(s)
    }
}

type Terms = Vec<(String, u32)>;

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

fn parse_complex(text: &str, line: usize) -> Result<Terms, ParseError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(syntax(line, "empty complex"));
    }
    if text == "0" {
        return Ok(Vec::new());
    }
    let mut terms = Vec::new();
    for term in text.split('+') {
        let term = term.trim();
        let digits_end = term.find(|c: char| !c.is_ascii_digit()).unwrap_or(term.len());
        let (coeff, name) = term.split_at(digits_end);
        let name = name.trim();
        if !valid_name(name) {
            return Err(syntax(line, format!("bad term `{term}`")));
        }
        let coeff: u32 = if coeff.is_empty() {
            1
        } else {
            coeff
                .parse()
                .map_err(|_| syntax(line, format!("bad coefficient in `{term}`")))?
        };
        if coeff == 0 {
            return Err(syntax(line, format!("zero coefficient in `{term}`")));
        }
        terms.push((name.to_string(), coeff));
    }
    Ok(terms)
}

fn parse_rate(value: &str, line: usize) -> Result<Rational, ParseError> {
    let q = parse_rational(value).map_err(|_| syntax(line, format!("bad rate `{}`", value.trim())))?;
    if !q.is_positive() {
        return Err(ParseError::NonPositiveRate {
            line,
            value: value.trim().to_string(),
        });
    }
    Ok(q)
}

/// `key = value` pairs after the reaction part.
fn parse_params(parts: &[&str], line: usize) -> Result<Vec<(String, String)>, ParseError> {
    parts
        .iter()
        .map(|p| {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| syntax(line, format!("expected `key = value`, got `{}`", p.trim())))?;
            Ok((k.trim().to_string(), v.trim().to_string()))
        })
        .collect()
}

fn take_param(params: &[(String, String)], key: &str, line: usize) -> Result<Rational, ParseError> {
    let (_, v) = params
        .iter()
        .find(|(k, _)| k == key)
        .ok_or_else(|| syntax(line, format!("missing `{key} = ...`")))?;
    parse_rate(v, line)
}

/// Parses the network file format described in the module docs.
pub fn parse_network(text: &str) -> Result<Network, ModelError> {
    let mut declared: Option<Vec<String>> = None;
    let mut seen: Vec<String> = Vec::new();
    let mut raw: Vec<(Terms, Terms, Rational, usize)> = Vec::new();

    for (idx, full) in text.lines().enumerate() {
        let line = idx + 1;
        let content = full.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let parts: Vec<&str> = content.split(';').collect();
        let head = parts[0].trim();

        if !head.contains("->") {
            if let Some((directive, rest)) = head.split_once(':') {
                let directive = directive.trim();
                if directive != "species" {
                    return Err(ParseError::UnknownDirective {
                        line,
                        directive: directive.to_string(),
                    }
                    .into());
                }
                if declared.is_some() || !raw.is_empty() {
                    return Err(syntax(line, "species header must come first and only once").into());
                }
                let names: Vec<String> = rest
                    .split(|c: char| c.is_whitespace() || c == ',')
                    .filter(|s| !s.is_empty())
                    .map(str::to_string)
                    .collect();
                SpeciesTable::new(names.clone()).map_err(|e| syntax(line, e.to_string()))?;
                declared = Some(names);
                continue;
            }
            return Err(syntax(line, format!("expected a reaction, got `{content}`")).into());
        }

        let params = parse_params(&parts[1..], line)?;
        let (reversible, lhs, rhs) = if let Some((l, r)) = head.split_once("<->") {
            (true, l, r)
        } else {
            let (l, r) = head.split_once("->").expect("checked above");
            (false, l, r)
        };
        let allowed: &[&str] = if reversible { &["kf", "kr"] } else { &["k"] };
        if let Some((k, _)) = params.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
            return Err(ParseError::UnknownDirective {
                line,
                directive: k.clone(),
            }
            .into());
        }
        let left = parse_complex(lhs, line)?;
        let right = parse_complex(rhs, line)?;
        for (name, _) in left.iter().chain(&right) {
            match &declared {
                Some(names) if !names.contains(name) => {
                    return Err(syntax(line, format!("undeclared species `{name}`")).into())
                }
                Some(_) => {}
                None => {
                    if !seen.contains(name) {
                        seen.push(name.clone());
                    }
                }
            }
        }
        if reversible {
            let kf = take_param(&params, "kf", line)?;
            let kr = take_param(&params, "kr", line)?;
            raw.push((left.clone(), right.clone(), kf, line));
            raw.push((right, left, kr, line));
        } else {
            let k = take_param(&params, "k", line)?;
            raw.push((left, right, k, line));
        }
    }

    let names = declared.unwrap_or(seen);
    if raw.is_empty() {
        return Err(ModelError::NoReactions);
    }
    let species = SpeciesTable::new(names)?;
    let build = |terms: &Terms| -> Complex {
        let mut coeffs = vec![0u32; species.len()];
        for (name, c) in terms {
            coeffs[species.index_of(name).expect("species registered")] += c;
        }
        Complex::new(coeffs)
    };
    let mut reactions = Vec::with_capacity(raw.len());
    for (l, r, k, line) in &raw {
        let (reactant, product) = (build(l), build(r));
        if reactant == product {
            return Err(ParseError::TrivialReaction { line: *line }.into());
        }
        reactions.push(Reaction::new(reactant, product, k.clone()));
    }
    Network::new(species, reactions)
}

/// Parses a comma-separated rate list such as `1,2,1/3,0.5`.
pub fn parse_rate_list(text: &str) -> Result<Vec<Rational>, ParseError> {
    text.split(',')
        .map(|s| {
            let q = parse_rational(s)?;
            if q.is_positive() {
                Ok(q)
            } else {
                Err(ParseError::BadNumber(s.trim().to_string()))
            }
        })
        .collect()
}

/// Convenience for tests and fixtures: exact reaction vectors as rationals.
pub fn reaction_vector_q(rx: &Reaction) -> Vec<Rational> {
    rx.reaction_vector()
        .into_iter()
        .map(|v| Rational::from_integer(v.into()))
        .collect()
}

/// Convenience: rational from an integer.
pub fn q_int(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX1: &str = "\
# Example 1 original
species: A1 A2
A1 + 2A2 -> A1 + 3A2 ; k = 1
A1 + 3A2 -> A1 + A2 ; k = 1
A1 + A2 -> 3A1 ; k = 1
2A1 -> A2 ; k = 1
";

    #[test]
    fn single_reaction() {
        let net = Network::parse("A1 -> A2 ; k = 1").unwrap();
        assert_eq!((net.num_species(), net.num_reactions(), net.num_complexes()), (2, 1, 2));
    }

    #[test]
    fn example_one_counts() {
        let net = Network::parse(EX1).unwrap();
        assert_eq!(net.num_species(), 2);
        assert_eq!(net.num_reactions(), 4);
        assert_eq!(net.num_complexes(), 6);
        assert_eq!(net.reactant_complexes().len(), 4);
    }

    #[test]
    fn reactant_equals_product_is_rejected() {
        let err = Network::parse("A1 -> A1 ; k = 1").unwrap_err();
        assert_eq!(err, ModelError::Parse(ParseError::TrivialReaction { line: 1 }));
        // also after merging terms
        let err = Network::parse("A1 + A1 -> 2A1 ; k = 1").unwrap_err();
        assert!(matches!(err, ModelError::Parse(ParseError::TrivialReaction { .. })));
    }

    #[test]
    fn terms_are_merged() {
        let net = Network::parse("A1 + A1 -> A2 ; k = 1").unwrap();
        assert_eq!(net.reactions()[0].reactant, Complex::new(vec![2, 0]));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = Network::parse("A -> B ; k = 1\nA -> ; k = 1").unwrap_err();
        assert!(matches!(err, ModelError::Parse(ParseError::Syntax { line: 2, .. })));
        let err = Network::parse("A -> B ; k = 0").unwrap_err();
        assert!(matches!(
            err,
            ModelError::Parse(ParseError::NonPositiveRate { line: 1, .. })
        ));
        let err = Network::parse("A -> B ; k = -1/2").unwrap_err();
        assert!(matches!(err, ModelError::Parse(ParseError::NonPositiveRate { .. })));
        let err = Network::parse("temperature: 300\nA -> B ; k = 1").unwrap_err();
        assert!(matches!(
            err,
            ModelError::Parse(ParseError::UnknownDirective { line: 1, .. })
        ));
        let err = Network::parse("A -> B ; q = 1").unwrap_err();
        assert!(matches!(err, ModelError::Parse(ParseError::UnknownDirective { .. })));
        let err = Network::parse("species: A\nA -> B ; k = 1").unwrap_err();
        assert!(matches!(err, ModelError::Parse(ParseError::Syntax { line: 2, .. })));
    }

    #[test]
    fn empty_file_has_no_reactions() {
        assert_eq!(Network::parse("# nothing\n").unwrap_err(), ModelError::NoReactions);
        assert_eq!(
            Network::new(SpeciesTable::numbered(1), vec![]).unwrap_err(),
            ModelError::NoReactions
        );
    }

    #[test]
    fn reversible_shorthand_and_zero_complex() {
        let net = Network::parse("A <-> 2A ; kf = 1 ; kr = 1/3\nA -> 0 ; k = 0.25").unwrap();
        assert_eq!(net.num_reactions(), 3);
        assert_eq!(net.reactions()[1].reactant, Complex::new(vec![2]));
        assert_eq!(net.reactions()[1].rate, Rational::new(1.into(), 3.into()));
        assert!(net.reactions()[2].product.is_zero());
        assert_eq!(net.reactions()[2].rate, Rational::new(1.into(), 4.into()));
    }

    #[test]
    fn header_fixes_species_order() {
        let net = Network::parse("species: B A\nA -> B ; k = 1").unwrap();
        assert_eq!(net.species().names(), &["B".to_string(), "A".to_string()]);
        assert_eq!(net.reactions()[0].reactant, Complex::new(vec![0, 1]));
    }

    #[test]
    fn canonical_index() {
        let net = Network::parse(EX1).unwrap();
        let i = net.complex_index(&Complex::new(vec![1, 3])).unwrap().unwrap();
        assert_eq!(net.complexes()[i], Complex::new(vec![1, 3]));
        assert_eq!(net.complex_index(&Complex::new(vec![5, 0])).unwrap(), None);
        assert!(matches!(
            net.complex_index(&Complex::new(vec![1])),
            Err(ModelError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn rational_rates_serialize_exactly() {
        let net = Network::parse("A1 -> A2 ; k = 1/3").unwrap();
        let text = net.to_text();
        assert!(text.contains("k = 1/3"), "{text}");
        assert_eq!(Network::parse(&text).unwrap(), net);
    }

    #[test]
    fn permutation_relabels() {
        let net = Network::parse("species: A B\nA + 2B -> A ; k = 1").unwrap();
        let p = net.permute_species(&[1, 0]).unwrap();
        assert_eq!(p.species().names()[0], "B");
        assert_eq!(p.reactions()[0].reactant, Complex::new(vec![2, 1]));
    }
}
