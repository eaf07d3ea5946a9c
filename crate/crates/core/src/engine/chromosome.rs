//! MEP genes and chromosomes, plus their line-oriented text format.
//!
//! Indices are 0-based in memory; the text format uses 1-based labels:
//!
//! ```text
//! 1: Initialize
//! 2: Initialize
//! 3: Mutate 1
//! 4: Select 1 3
//! 5: Crossover 2 4
//! ```

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::micro::EvalReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GeneKind {
    Initialize,
    Mutate,
    Select,
    Crossover,
}

impl GeneKind {
    pub const ALL: [GeneKind; 4] = [
        GeneKind::Initialize,
        GeneKind::Mutate,
        GeneKind::Select,
        GeneKind::Crossover,
    ];

    pub fn arity(self) -> usize {
        match self {
            GeneKind::Initialize => 0,
            GeneKind::Mutate => 1,
            GeneKind::Select | GeneKind::Crossover => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GeneKind::Initialize => "Initialize",
            GeneKind::Mutate => "Mutate",
            GeneKind::Select => "Select",
            GeneKind::Crossover => "Crossover",
        }
    }
}

impl fmt::Display for GeneKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GeneKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GeneKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown gene kind '{s}'"))
    }
}

/// One EA instruction. Arguments are 0-based indices of earlier genes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gene {
    Initialize,
    Mutate(usize),
    Select(usize, usize),
    Crossover(usize, usize),
}

impl Gene {
    /// Build a gene from a kind and an argument list of matching arity.
    pub fn from_parts(kind: GeneKind, args: &[usize]) -> Option<Gene> {
        match (kind, args) {
            (GeneKind::Initialize, []) => Some(Gene::Initialize),
            (GeneKind::Mutate, &[a]) => Some(Gene::Mutate(a)),
            (GeneKind::Select, &[a, b]) => Some(Gene::Select(a, b)),
            (GeneKind::Crossover, &[a, b]) => Some(Gene::Crossover(a, b)),
            _ => None,
        }
    }

    pub fn kind(&self) -> GeneKind {
        match self {
            Gene::Initialize => GeneKind::Initialize,
            Gene::Mutate(_) => GeneKind::Mutate,
            Gene::Select(..) => GeneKind::Select,
            Gene::Crossover(..) => GeneKind::Crossover,
        }
    }

    pub fn args(&self) -> Vec<usize> {
        match *self {
            Gene::Initialize => vec![],
            Gene::Mutate(a) => vec![a],
            Gene::Select(a, b) | Gene::Crossover(a, b) => vec![a, b],
        }
    }

    /// Apply `f` to every argument index.
    pub fn map_args(self, mut f: impl FnMut(usize) -> usize) -> Gene {
        match self {
            Gene::Initialize => Gene::Initialize,
            Gene::Mutate(a) => Gene::Mutate(f(a)),
            Gene::Select(a, b) => Gene::Select(f(a), f(b)),
            Gene::Crossover(a, b) => Gene::Crossover(f(a), f(b)),
        }
    }

    /// Every argument points strictly backwards from `position`.
    pub fn is_valid_at(&self, position: usize) -> bool {
        match *self {
            Gene::Initialize => true,
            Gene::Mutate(a) => a < position,
            Gene::Select(a, b) | Gene::Crossover(a, b) => a < position && b < position,
        }
    }
}

/// Fixed-length list of genes; position `p` encodes the EA rooted at `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct MepChromosome {
    genes: Vec<Gene>,
    cached_eval: Option<EvalReport>,
}

impl MepChromosome {
    /// Validating constructor.
    pub fn new(genes: Vec<Gene>) -> Result<Self> {
        let c = Self {
            genes,
            cached_eval: None,
        };
        c.validate()?;
        Ok(c)
    }

    /// Constructor for genes already known to be valid.
    pub(crate) fn from_valid(genes: Vec<Gene>) -> Self {
        debug_assert!(genes.iter().enumerate().all(|(i, g)| g.is_valid_at(i)));
        debug_assert!(!genes.is_empty());
        Self {
            genes,
            cached_eval: None,
        }
    }

    pub fn genes(&self) -> &[Gene] {
        &self.genes
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }

    pub fn cached_eval(&self) -> Option<&EvalReport> {
        self.cached_eval.as_ref()
    }

    pub fn set_eval(&mut self, report: EvalReport) {
        self.cached_eval = Some(report);
    }

    pub fn clear_eval(&mut self) {
        self.cached_eval = None;
    }

    /// Chromosome fitness, if evaluated.
    pub fn fitness(&self) -> Option<f64> {
        self.cached_eval.as_ref().map(|r| r.fitness)
    }

    /// Check the positional invariants: non-empty, first gene terminal,
    /// every argument strictly backwards.
    pub fn validate(&self) -> Result<()> {
        if self.genes.is_empty() {
            return Err(Error::config("chromosome has no genes"));
        }
        if self.genes[0] != Gene::Initialize {
            return Err(Error::config("first gene must be Initialize"));
        }
        for (i, g) in self.genes.iter().enumerate() {
            if !g.is_valid_at(i) {
                return Err(Error::config(format!(
                    "gene {} ({}) references a gene at or after its own position",
                    i + 1,
                    g.kind()
                )));
            }
        }
        Ok(())
    }

    /// Parse the 1-based text format. Blank lines and `#` comments are
    /// skipped; arguments may be separated by spaces or commas.
    pub fn parse(text: &str) -> Result<Self> {
        let mut genes = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (label, body) = line
                .split_once(':')
                .ok_or_else(|| Error::parse(line_no, "expected '<label>: <kind> [args]'"))?;
            let label: usize = label
                .trim()
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad label '{}'", label.trim())))?;
            let position = genes.len();
            if label != position + 1 {
                return Err(Error::parse(
                    line_no,
                    format!("expected label {}, found {label}", position + 1),
                ));
            }
            let mut tokens = body
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty());
            let kind: GeneKind = tokens
                .next()
                .ok_or_else(|| Error::parse(line_no, "missing gene kind"))?
                .parse()
                .map_err(|e: String| Error::parse(line_no, e))?;
            let mut args = Vec::with_capacity(2);
            for t in tokens {
                let a: usize = t
                    .parse()
                    .map_err(|_| Error::parse(line_no, format!("bad argument '{t}'")))?;
                if a == 0 || a > position {
                    return Err(Error::parse(
                        line_no,
                        format!("argument {a} is not an earlier gene of gene {label}"),
                    ));
                }
                args.push(a - 1);
            }
            let gene = Gene::from_parts(kind, &args).ok_or_else(|| {
                Error::parse(
                    line_no,
                    format!(
                        "{kind} takes {} argument(s), got {}",
                        kind.arity(),
                        args.len()
                    ),
                )
            })?;
            genes.push(gene);
        }
        if genes.is_empty() {
            return Err(Error::parse(1, "no genes found"));
        }
        // Forward references are rejected above, so only position 0 can
        // fail here.
        MepChromosome::new(genes).map_err(|e| Error::parse(1, e.to_string()))
    }
}

impl FromStr for MepChromosome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MepChromosome::parse(s)
    }
}

impl fmt::Display for MepChromosome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, g) in self.genes.iter().enumerate() {
            write!(f, "{}: {}", i + 1, g.kind())?;
            for a in g.args() {
                write!(f, " {}", a + 1)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE_C: &str = "\
1: Initialize
2: Initialize
3: Mutate 1
4: Select 1, 3
5: Crossover 2, 4
6: Mutate 4
7: Mutate 5
8: Crossover 2, 6
";

    #[test]
    fn parses_listing_with_commas() {
        let c = MepChromosome::parse(EXAMPLE_C).unwrap();
        assert_eq!(c.len(), 8);
        assert_eq!(c.genes()[3], Gene::Select(0, 2));
        assert_eq!(c.genes()[7], Gene::Crossover(1, 5));
    }

    #[test]
    fn display_round_trips() {
        let c = MepChromosome::parse(EXAMPLE_C).unwrap();
        let text = c.to_string();
        assert!(text.starts_with("1: Initialize\n"));
        assert!(text.contains("4: Select 1 3\n"));
        assert_eq!(MepChromosome::parse(&text).unwrap(), c);
    }

    #[test]
    fn whitespace_and_comments_tolerated() {
        let c = MepChromosome::parse("  # header\n\n 1 :   initialize \n2:Mutate\t1  # tail\n")
            .unwrap();
        assert_eq!(c.genes(), &[Gene::Initialize, Gene::Mutate(0)]);
    }

    #[test]
    fn rejects_forward_reference() {
        let err = MepChromosome::parse("1: Initialize\n2: Select 1 2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn rejects_unknown_kind() {
        let err = MepChromosome::parse("1: Initialize\n2: Teleport 1\n").unwrap_err();
        assert!(err.to_string().contains("Teleport"));
    }

    #[test]
    fn rejects_non_terminal_first_gene() {
        assert!(MepChromosome::parse("1: Mutate 1\n").is_err());
        assert!(MepChromosome::new(vec![Gene::Mutate(0)]).is_err());
    }

    #[test]
    fn rejects_arity_mismatch_and_bad_labels() {
        assert!(MepChromosome::parse("1: Initialize\n2: Select 1\n").is_err());
        assert!(MepChromosome::parse("1: Initialize 1\n").is_err());
        assert!(MepChromosome::parse("1: Initialize\n3: Mutate 1\n").is_err());
        assert!(MepChromosome::parse("").is_err());
    }

    #[test]
    fn validity_at_position() {
        assert!(Gene::Initialize.is_valid_at(0));
        assert!(!Gene::Mutate(0).is_valid_at(0));
        assert!(Gene::Select(0, 4).is_valid_at(5));
        assert!(!Gene::Crossover(5, 0).is_valid_at(5));
    }
}
