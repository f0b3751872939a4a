//! Text formats: group files, class inventories and witness lists.
//!
//! All permutations are written in 1-based cycle notation, `()` for the
//! identity. `#` starts a comment in every format.

use std::fmt::Write as _;
use std::path::Path;

use noncomm_core::classes::{ClassInventory, ConjugacyClass};
use noncomm_core::machale::{self, WitnessList, WitnessPair};
use noncomm_core::{CycleType, GroupOrder, Perm, PermGroup};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl FormatError {
    fn at(line: usize, message: impl Into<String>) -> FormatError {
        FormatError::Line { line, message: message.into() }
    }
}

pub fn read_text(path: &Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.display().to_string(), source })
}

/// Meaningful lines with their 1-based numbers, comments stripped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

/// `degree <n>` followed by one generator per line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupFile {
    pub degree: usize,
    pub generators: Vec<Perm>,
}

impl GroupFile {
    pub fn parse(text: &str) -> Result<GroupFile, FormatError> {
        let mut lines = content_lines(text);
        let (line, header) = lines.next().ok_or_else(|| FormatError::at(1, "expected `degree <n>`"))?;
        let degree = header
            .strip_prefix("degree")
            .and_then(|rest| rest.trim().parse::<usize>().ok())
            .filter(|&d| d > 0 && d <= noncomm_core::perm::MAX_DEGREE)
            .ok_or_else(|| FormatError::at(line, format!("expected `degree <n>`, found `{header}`")))?;
        let mut generators = Vec::new();
        for (line, text) in lines {
            let g = Perm::parse_cycles(text, degree).map_err(|e| FormatError::at(line, e.to_string()))?;
            generators.push(g);
        }
        Ok(GroupFile { degree, generators })
    }

    pub fn read(path: &Path) -> Result<GroupFile, FormatError> {
        GroupFile::parse(&read_text(path)?)
    }

    /// The embedded 44-point group.
    pub fn embedded() -> GroupFile {
        let group = machale::build_machale_group();
        GroupFile { degree: group.degree(), generators: group.generators().to_vec() }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("degree {}\n", self.degree);
        for g in &self.generators {
            out.push_str(&g.to_cycle_string());
            out.push('\n');
        }
        out
    }

    /// No generators gives the trivial group.
    pub fn to_group(&self) -> PermGroup {
        if self.generators.is_empty() {
            PermGroup::trivial(self.degree)
        } else {
            PermGroup::new(self.degree, self.generators.clone()).expect("generators parsed at the file degree")
        }
    }
}

/// Header `inventory order <n> classes <k> degree <d>`, then one class per
/// line: representative, centralizer order, class size, element order and
/// the cycle types of the representative, its square and its cube, separated
/// by tabs.
pub fn write_inventory(inventory: &ClassInventory, degree: usize) -> String {
    let mut out = String::new();
    writeln!(out, "inventory order {} classes {} degree {}", inventory.group_order(), inventory.len(), degree).unwrap();
    for class in inventory.classes() {
        let f = class.fingerprint();
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            class.representative().to_cycle_string(),
            class.centralizer_order(),
            class.size(),
            f.order,
            f.cycle_type,
            f.square,
            f.cube
        )
        .unwrap();
    }
    out
}

#[derive(Clone, Debug)]
pub struct InventoryFile {
    pub degree: usize,
    pub inventory: ClassInventory,
}

pub fn parse_inventory(text: &str) -> Result<InventoryFile, FormatError> {
    let mut lines = content_lines(text);
    let (line, header) = lines.next().ok_or_else(|| FormatError::at(1, "missing inventory header"))?;
    let words: Vec<&str> = header.split_whitespace().collect();
    let bad_header = || FormatError::at(line, "expected `inventory order <n> classes <k> degree <d>`");
    if words.len() != 7
        || words[0] != "inventory"
        || words[1] != "order"
        || words[3] != "classes"
        || words[5] != "degree"
    {
        return Err(bad_header());
    }
    let order = GroupOrder::parse(words[2]).ok_or_else(bad_header)?;
    let count: usize = words[4].parse().map_err(|_| bad_header())?;
    let degree: usize = words[6].parse().map_err(|_| bad_header())?;
    let mut classes = Vec::with_capacity(count);
    for (line, text) in lines {
        let fields: Vec<&str> = text.split('\t').map(str::trim).collect();
        if fields.len() != 7 {
            return Err(FormatError::at(line, format!("expected 7 tab-separated fields, found {}", fields.len())));
        }
        let rep = Perm::parse_cycles(fields[0], degree).map_err(|e| FormatError::at(line, e.to_string()))?;
        let number =
            |s: &str, what: &str| GroupOrder::parse(s).ok_or_else(|| FormatError::at(line, format!("bad {what}")));
        let centralizer = number(fields[1], "centralizer order")?;
        let size = number(fields[2], "class size")?;
        let class =
            ConjugacyClass::new(rep, centralizer, size, &order).map_err(|e| FormatError::at(line, e.to_string()))?;
        let f = class.fingerprint();
        let elem_order: u128 = fields[3].parse().map_err(|_| FormatError::at(line, "bad element order"))?;
        let types: Vec<CycleType> = fields[4..7]
            .iter()
            .map(|s| s.parse::<CycleType>().map_err(|e| FormatError::at(line, e.to_string())))
            .collect::<Result<_, _>>()?;
        if elem_order != f.order || types[0] != f.cycle_type || types[1] != f.square || types[2] != f.cube {
            return Err(FormatError::at(line, "fingerprint does not match the representative"));
        }
        classes.push(class);
    }
    if classes.len() != count {
        return Err(FormatError::at(0, format!("header announces {count} classes, file has {}", classes.len())));
    }
    let inventory = ClassInventory::from_classes(order, classes).map_err(|e| FormatError::at(0, e.to_string()))?;
    Ok(InventoryFile { degree, inventory })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessFile {
    pub degree: usize,
    pub seed: u64,
    pub witnesses: WitnessList,
}

/// Header `witnesses <count> degree <d> seed <s>`, then `a<TAB>b` per line.
pub fn write_witnesses(file: &WitnessFile) -> String {
    let mut out = String::new();
    writeln!(out, "witnesses {} degree {} seed {}", file.witnesses.len(), file.degree, file.seed).unwrap();
    for pair in file.witnesses.pairs() {
        writeln!(out, "{}\t{}", pair.a.to_cycle_string(), pair.b.to_cycle_string()).unwrap();
    }
    out
}

pub fn parse_witnesses(text: &str) -> Result<WitnessFile, FormatError> {
    let mut lines = content_lines(text);
    let (line, header) = lines.next().ok_or_else(|| FormatError::at(1, "missing witness header"))?;
    let words: Vec<&str> = header.split_whitespace().collect();
    let bad_header = || FormatError::at(line, "expected `witnesses <count> degree <d> seed <s>`");
    if words.len() != 6 || words[0] != "witnesses" || words[2] != "degree" || words[4] != "seed" {
        return Err(bad_header());
    }
    let count: usize = words[1].parse().map_err(|_| bad_header())?;
    let degree: usize = words[3].parse().map_err(|_| bad_header())?;
    let seed: u64 = words[5].parse().map_err(|_| bad_header())?;
    let mut pairs = Vec::with_capacity(count);
    for (line, text) in lines {
        let (a, b) = text.split_once('\t').ok_or_else(|| FormatError::at(line, "expected `a<TAB>b`"))?;
        let a = Perm::parse_cycles(a.trim(), degree).map_err(|e| FormatError::at(line, e.to_string()))?;
        let b = Perm::parse_cycles(b.trim(), degree).map_err(|e| FormatError::at(line, e.to_string()))?;
        pairs.push(WitnessPair { a, b });
    }
    if pairs.len() != count {
        return Err(FormatError::at(0, format!("header announces {count} pairs, file has {}", pairs.len())));
    }
    Ok(WitnessFile { degree, seed, witnesses: WitnessList(pairs) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use noncomm_core::classes::enumerate_classes_direct;

    #[test]
    fn group_file_parse_and_errors() {
        let g = GroupFile::parse("# S4\ndegree 4\n(1,2)  # a transposition\n\n(1,2,3,4)\n").unwrap();
        assert_eq!(g.degree, 4);
        assert_eq!(g.generators.len(), 2);
        assert_eq!(GroupFile::parse(&g.to_text()).unwrap(), g);
        match GroupFile::parse("degree 4\n(1,2)\n(1,2,5)\n").unwrap_err() {
            FormatError::Line { line, .. } => assert_eq!(line, 3),
            e => panic!("{e}"),
        }
        match GroupFile::parse("# nothing\ndegre 4\n").unwrap_err() {
            FormatError::Line { line, .. } => assert_eq!(line, 2),
            e => panic!("{e}"),
        }
        assert_eq!(GroupFile::parse("degree 3\n").unwrap().to_group().chain(0).order(), 1u64);
    }

    #[test]
    fn embedded_file_matches_generators() {
        let g = GroupFile::embedded();
        assert_eq!(g.degree, 44);
        assert_eq!(g.generators[0].to_cycle_string(), "(1,2)(43,44)");
        assert_eq!(GroupFile::parse(&g.to_text()).unwrap(), g);
    }

    #[test]
    fn inventory_round_trip() {
        let s4 = GroupFile::parse("degree 4\n(1,2)\n(1,2,3,4)\n").unwrap().to_group().chain(0);
        let inv = enumerate_classes_direct(&s4).unwrap();
        let text = write_inventory(&inv, 4);
        assert!(text.starts_with("inventory order 24 classes 5 degree 4\n"));
        let parsed = parse_inventory(&text).unwrap();
        assert_eq!(parsed.degree, 4);
        assert_eq!(parsed.inventory.classes(), inv.classes());
        let broken = text.replacen("()\t24\t1\t", "()\t12\t1\t", 1);
        assert!(parse_inventory(&broken).is_err());
    }

    #[test]
    fn witness_round_trip() {
        let a = Perm::parse_cycles("(1,2,3)", 4).unwrap();
        let file = WitnessFile {
            degree: 4,
            seed: 9,
            witnesses: WitnessList(vec![
                WitnessPair { a: Perm::identity(4), b: Perm::identity(4) },
                WitnessPair { a: a.clone(), b: a.inverse() },
            ]),
        };
        let text = write_witnesses(&file);
        assert!(text.starts_with("witnesses 2 degree 4 seed 9\n()\t()\n"));
        assert_eq!(parse_witnesses(&text).unwrap(), file);
        let truncated: String = text.lines().take(2).map(|l| format!("{l}\n")).collect();
        assert!(parse_witnesses(&truncated).unwrap_err().to_string().contains("announces 2"));
    }
}
