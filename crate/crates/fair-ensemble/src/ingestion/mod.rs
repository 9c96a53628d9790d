//! Dataset loading, preprocessing, caching and synthetic protected-attribute
//! injection for the benchmark roster.

pub mod fixtures;
pub mod inject;
mod parsers;

use std::fmt::Write as _;
use std::io::Read;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::core::Dataset;
use crate::error::{Error, Result};

pub use inject::{inject_protected_attribute, synthesize_groups};
pub use parsers::RawParts;

/// The supported dataset identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetKind {
    Communities,
    GermanCredit,
    Annthyroid,
    Cardio,
    JapaneseVowels,
    BreastCancer,
    Mammography,
    Pima,
    Custom,
}

impl DatasetKind {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "communities" => Ok(Self::Communities),
            "german_credit" => Ok(Self::GermanCredit),
            "annthyroid" => Ok(Self::Annthyroid),
            "cardio" => Ok(Self::Cardio),
            "japanese_vowels" => Ok(Self::JapaneseVowels),
            "breast_cancer" => Ok(Self::BreastCancer),
            "mammography" => Ok(Self::Mammography),
            "pima" => Ok(Self::Pima),
            "custom" => Ok(Self::Custom),
            other => Err(Error::InvalidConfig(format!(
                "unknown dataset kind '{other}'"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Communities => "communities",
            Self::GermanCredit => "german_credit",
            Self::Annthyroid => "annthyroid",
            Self::Cardio => "cardio",
            Self::JapaneseVowels => "japanese_vowels",
            Self::BreastCancer => "breast_cancer",
            Self::Mammography => "mammography",
            Self::Pima => "pima",
            Self::Custom => "custom",
        }
    }

    /// Expected (inliers, outliers) of the benchmark roster; None for custom.
    pub fn expected_counts(&self) -> Option<(usize, usize)> {
        match self {
            Self::Communities => Some((1_717, 277)),
            Self::GermanCredit => Some((700, 300)),
            Self::Annthyroid => Some((6_666, 534)),
            Self::Cardio => Some((1_655, 176)),
            Self::JapaneseVowels => Some((1_406, 50)),
            Self::BreastCancer => Some((444, 239)),
            Self::Mammography => Some((10_923, 260)),
            Self::Pima => Some((500, 268)),
            Self::Custom => None,
        }
    }

    /// Expected protected-group count; None for custom.
    pub fn expected_groups(&self) -> Option<usize> {
        match self {
            Self::Communities | Self::GermanCredit | Self::Mammography | Self::Pima => Some(4),
            Self::Annthyroid | Self::Cardio => Some(2),
            Self::JapaneseVowels | Self::BreastCancer => Some(3),
            Self::Custom => None,
        }
    }

    /// Whether the protected attribute is native to the file.
    pub fn has_native_groups(&self) -> bool {
        matches!(self, Self::Communities | Self::GermanCredit | Self::Custom)
    }
}

/// How the protected attribute is produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GroupRule {
    /// Use the group information native to the file.
    Native,
    /// Seeded injection concentrating outliers into group 0.
    Synthetic {
        v_groups: u32,
        bias_strength: f64,
        seed: u64,
    },
}

/// Everything needed to load one dataset.
#[derive(Debug, Clone)]
pub struct DatasetSpec {
    pub name: String,
    pub kind: DatasetKind,
    pub source_path: PathBuf,
    pub group_rule: GroupRule,
    /// German Credit only: 0-based column of the personal-status code.
    pub german_group_column: usize,
}

impl DatasetSpec {
    pub fn custom(path: impl Into<PathBuf>) -> Self {
        let path = path.into();
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "custom".into());
        DatasetSpec {
            name,
            kind: DatasetKind::Custom,
            source_path: path,
            group_rule: GroupRule::Native,
            german_group_column: DEFAULT_GERMAN_GROUP_COLUMN,
        }
    }
}

pub const DEFAULT_GERMAN_GROUP_COLUMN: usize = 8;

/// Load and preprocess a dataset per its spec, enforcing the roster sizes
/// for the eight named datasets.
pub fn load_dataset(spec: &DatasetSpec) -> Result<Dataset> {
    let path = spec.source_path.as_path();
    if !path.exists() {
        return Err(Error::Parse {
            path: path.display().to_string(),
            message: "file does not exist".into(),
        });
    }
    let parts = match spec.kind {
        DatasetKind::Communities => parsers::parse_communities(path)?,
        DatasetKind::GermanCredit => parsers::parse_german(path, spec.german_group_column)?,
        DatasetKind::Custom => parsers::parse_custom(path)?,
        _ => parsers::parse_labeled_table(path)?,
    };

    let groups = match spec.group_rule {
        GroupRule::Native => parts.native_groups.ok_or_else(|| {
            let detail = if spec.kind == DatasetKind::Custom {
                "file has no 'group' column"
            } else {
                "kind has no native protected attribute"
            };
            Error::InvalidConfig(format!(
                "{} ({detail}); use a synthetic group rule",
                spec.kind.name()
            ))
        })?,
        GroupRule::Synthetic {
            v_groups,
            bias_strength,
            seed,
        } => {
            let labels = parts.labels.as_deref().ok_or_else(|| {
                Error::InvalidConfig("synthetic group rule needs ground-truth labels".into())
            })?;
            synthesize_groups(labels, v_groups, bias_strength, seed)?
        }
    };

    let dataset = Dataset::new(spec.name.clone(), parts.features, groups, parts.labels)?;
    check_roster_sizes(spec, &dataset)?;
    Ok(dataset)
}

fn check_roster_sizes(spec: &DatasetSpec, dataset: &Dataset) -> Result<()> {
    let Some((want_inliers, want_outliers)) = spec.kind.expected_counts() else {
        return Ok(());
    };
    let mut report = String::new();
    match dataset.label_counts() {
        Some((inl, out)) => {
            if inl != want_inliers {
                let _ = write!(report, "inliers {inl} != expected {want_inliers}; ");
            }
            if out != want_outliers {
                let _ = write!(report, "outliers {out} != expected {want_outliers}; ");
            }
        }
        None => {
            let _ = write!(report, "labels missing; ");
        }
    }
    if let Some(want_groups) = spec.kind.expected_groups() {
        let got = dataset.n_groups();
        if got != want_groups {
            let _ = write!(report, "groups {got} != expected {want_groups}; ");
        }
    }
    if report.is_empty() {
        Ok(())
    } else {
        Err(Error::SizeMismatch {
            name: spec.kind.name().to_string(),
            report: report.trim_end_matches("; ").to_string(),
        })
    }
}

/// Write a dataset in the self-describing cache format: header
/// `f0,...,f{m-1},group[,label]`, floats in shortest round-trip form so
/// `load_cached(save_dataset(d)) == d` bit-exactly.
pub fn save_dataset(dataset: &Dataset, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    let mut out = String::new();
    let m = dataset.n_features();
    for j in 0..m {
        let _ = write!(out, "f{j},");
    }
    out.push_str("group");
    if dataset.labels().is_some() {
        out.push_str(",label");
    }
    out.push('\n');
    for i in 0..dataset.n() {
        for v in dataset.features().row(i) {
            let _ = write!(out, "{v},");
        }
        let _ = write!(out, "{}", dataset.groups()[i]);
        if let Some(labels) = dataset.labels() {
            let _ = write!(out, ",{}", labels[i]);
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Save with a key-value metadata sidecar at `<path>.meta.txt`.
pub fn save_dataset_with_meta(
    dataset: &Dataset,
    path: &Path,
    meta: &[(String, String)],
) -> Result<()> {
    save_dataset(dataset, path)?;
    let mut text = String::new();
    for (k, v) in meta {
        let _ = writeln!(text, "{k} = {v}");
    }
    std::fs::write(sidecar_path(path), text)?;
    Ok(())
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut os = path.as_os_str().to_owned();
    os.push(".meta.txt");
    PathBuf::from(os)
}

/// Load a dataset previously written by [`save_dataset`] (or any custom
/// file in the same format).
pub fn load_cached(path: &Path) -> Result<Dataset> {
    load_dataset(&DatasetSpec::custom(path))
}

/// Hex SHA-256 of a file, recorded in experiment metadata.
pub fn file_sha256(path: &Path) -> Result<String> {
    let mut file = std::fs::File::open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let read = file.read(&mut buf)?;
        if read == 0 {
            break;
        }
        hasher.update(&buf[..read]);
    }
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for b in digest {
        let _ = write!(hex, "{b:02x}");
    }
    Ok(hex)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::Matrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use tempfile::tempdir;

    fn random_dataset(seed: u64, with_labels: bool) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 30;
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..3).map(|_| rng.gen::<f64>() * 100.0 - 50.0).collect())
            .collect();
        let groups: Vec<u32> = (0..n).map(|_| rng.gen_range(0..3u32)).collect();
        let groups = ensure_cover(groups);
        let labels = with_labels.then(|| (0..n).map(|_| rng.gen_range(0..2u8)).collect());
        Dataset::new("rand", Matrix::from_rows(rows).unwrap(), groups, labels).unwrap()
    }

    fn ensure_cover(mut groups: Vec<u32>) -> Vec<u32> {
        groups[0] = 0;
        groups[1] = 1;
        groups[2] = 2;
        groups
    }

    #[test]
    fn save_load_round_trip_is_identity() {
        let dir = tempdir().unwrap();
        for seed in [1, 2, 3] {
            for with_labels in [true, false] {
                let ds = random_dataset(seed, with_labels);
                let path = dir.path().join(format!("ds_{seed}_{with_labels}.csv"));
                save_dataset(&ds, &path).unwrap();
                let back = load_cached(&path).unwrap();
                assert_eq!(back.features(), ds.features());
                assert_eq!(back.groups(), ds.groups());
                assert_eq!(back.labels(), ds.labels());
            }
        }
    }

    #[test]
    fn missing_group_column_is_parse_error() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("nogroup.csv");
        std::fs::write(&path, "f0,f1,label\n0.5,1.0,0\n0.2,0.3,1\n").unwrap();
        let err = load_cached(&path).unwrap_err();
        assert!(err.to_string().contains("group"));
    }

    #[test]
    fn german_shaped_file_loads_four_groups() {
        // 12 rows, status codes in column 8 of 10 columns, label last.
        let dir = tempdir().unwrap();
        let path = dir.path().join("german_shaped.csv");
        let mut text = String::new();
        for i in 0..12 {
            let status = 91 + (i % 4);
            let label = if i % 3 == 0 { 2 } else { 1 };
            text.push_str(&format!(
                "{} {} {} {} {} {} {} {} {} {}\n",
                i,
                i * 2,
                5 - (i % 5),
                i % 7,
                i,
                3,
                i % 2,
                4,
                status,
                label
            ));
        }
        std::fs::write(&path, text).unwrap();
        let parts = super::parsers::parse_german(&path, 8).unwrap();
        let groups = parts.native_groups.unwrap();
        let mut distinct = groups.clone();
        distinct.sort_unstable();
        distinct.dedup();
        assert_eq!(distinct, vec![0, 1, 2, 3]);
        let labels = parts.labels.unwrap();
        assert_eq!(labels.iter().filter(|l| **l == 1).count(), 4);
        // wired through the named loader the same file trips the size check
        let spec = DatasetSpec {
            name: "german_credit".into(),
            kind: DatasetKind::GermanCredit,
            source_path: path,
            group_rule: GroupRule::Native,
            german_group_column: 8,
        };
        let err = load_dataset(&spec).unwrap_err();
        assert!(matches!(err, Error::SizeMismatch { .. }));
    }

    #[test]
    fn communities_shaped_file_parses_groups_and_labels() {
        // 8 rows x 14 cols: 5 non-predictive, race pcts at 7..=10, crime last.
        // Column 6 carries a missing value and must be dropped, keeping rows.
        let dir = tempdir().unwrap();
        let path = dir.path().join("communities_shaped.csv");
        let mut text = String::new();
        for i in 0..8 {
            let crime = if i % 4 == 0 { 0.8 } else { 0.2 };
            let races = match i % 4 {
                0 => "0.9,0.1,0.0,0.0",
                1 => "0.1,0.9,0.0,0.0",
                2 => "0.0,0.1,0.9,0.0",
                _ => "0.0,0.1,0.0,0.9",
            };
            let missing = if i == 3 { "?" } else { "0.5" };
            text.push_str(&format!(
                "8,?,?,name{i},1,0.{i},{missing},{races},0.3,0.4,{crime}\n"
            ));
        }
        std::fs::write(&path, text).unwrap();
        let parts = super::parsers::parse_communities(&path).unwrap();
        assert_eq!(parts.features.rows(), 8);
        // columns kept: index 5 plus the two trailing predictive ones
        assert_eq!(parts.features.cols(), 3);
        let groups = parts.native_groups.unwrap();
        assert_eq!(&groups[..4], &[0, 1, 2, 3]);
        let labels = parts.labels.unwrap();
        assert_eq!(labels.iter().filter(|l| **l == 1).count(), 2);
    }

    #[test]
    fn custom_file_without_groups_accepts_synthetic_rule() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("labeled_only.csv");
        let mut text = String::from("a,b,label\n");
        for i in 0..40 {
            let label = u8::from(i % 8 == 0);
            text.push_str(&format!("{}.5,{},{}\n", i, 40 - i, label));
        }
        std::fs::write(&path, text).unwrap();
        let mut spec = DatasetSpec::custom(&path);
        // native rule cannot work without a group column
        assert!(load_dataset(&spec).is_err());
        spec.group_rule = GroupRule::Synthetic {
            v_groups: 2,
            bias_strength: 1.0,
            seed: 5,
        };
        let ds = load_dataset(&spec).unwrap();
        assert_eq!(ds.n(), 40);
        assert_eq!(ds.n_groups(), 2);
        let labels = ds.labels().unwrap();
        for (g, l) in ds.groups().iter().zip(labels) {
            if *l == 1 {
                assert_eq!(*g, 0, "maximal bias puts outliers in group 0");
            }
        }
    }

    #[test]
    fn labeled_table_parser_handles_header_and_no_header() {
        let dir = tempdir().unwrap();
        let with_header = dir.path().join("h.csv");
        std::fs::write(&with_header, "x,y,outlier\n1.0,2.0,0\n5.0,6.0,1\n").unwrap();
        let parts = super::parsers::parse_labeled_table(&with_header).unwrap();
        assert_eq!(parts.features.rows(), 2);
        assert_eq!(parts.labels.as_ref().unwrap(), &vec![0, 1]);

        let no_header = dir.path().join("n.csv");
        std::fs::write(&no_header, "1.0,2.0,0\n5.0,6.0,1\n7.0,1.0,0\n").unwrap();
        let parts = super::parsers::parse_labeled_table(&no_header).unwrap();
        assert_eq!(parts.features.rows(), 3);
    }

    #[test]
    fn checksum_is_stable() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("x.txt");
        std::fs::write(&path, "hello\n").unwrap();
        let a = file_sha256(&path).unwrap();
        let b = file_sha256(&path).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 64);
    }
}
