use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use crate::error::{DataError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Covid,
    NonCovid,
}

impl Label {
    pub const ALL: [Label; 2] = [Label::Covid, Label::NonCovid];

    pub fn as_str(&self) -> &'static str {
        match self {
            Label::Covid => "COVID",
            Label::NonCovid => "NonCOVID",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "COVID" => Some(Label::Covid),
            "NonCOVID" => Some(Label::NonCovid),
            _ => None,
        }
    }

    /// Training target: COVID is the positive class.
    pub fn target(&self) -> f64 {
        match self {
            Label::Covid => 1.0,
            Label::NonCovid => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Modality {
    Ct,
    Xray,
}

impl Modality {
    pub fn as_str(&self) -> &'static str {
        match self {
            Modality::Ct => "CT",
            Modality::Xray => "XRAY",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "CT" => Some(Modality::Ct),
            "XRAY" => Some(Modality::Xray),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Split {
    Train,
    Val,
    Test,
    Unassigned,
}

impl Split {
    pub fn as_str(&self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
            Split::Unassigned => "unassigned",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "train" => Some(Split::Train),
            "val" => Some(Split::Val),
            "test" => Some(Split::Test),
            "unassigned" => Some(Split::Unassigned),
            _ => None,
        }
    }
}

/// One sample: a path relative to the manifest root plus its class, source
/// modality and split assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleRecord {
    pub path: String,
    pub label: Label,
    pub modality: Modality,
    pub split: Split,
}

/// Per (label, modality) record counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClassCounts {
    pub ct_covid: usize,
    pub ct_noncovid: usize,
    pub xray_covid: usize,
    pub xray_noncovid: usize,
}

impl ClassCounts {
    pub fn covid(&self) -> usize {
        self.ct_covid + self.xray_covid
    }

    pub fn noncovid(&self) -> usize {
        self.ct_noncovid + self.xray_noncovid
    }

    pub fn total(&self) -> usize {
        self.covid() + self.noncovid()
    }
}

/// The contract between dataset preparation and training: a list of sample
/// records anchored at a root directory. On disk it is a CSV with header
/// `path,label,modality,split`, LF line endings, rows sorted by path.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetManifest {
    pub root: PathBuf,
    pub records: Vec<SampleRecord>,
}

impl DatasetManifest {
    pub fn new(root: impl Into<PathBuf>, mut records: Vec<SampleRecord>) -> Result<Self> {
        records.sort_by(|a, b| a.path.cmp(&b.path));
        let mut seen = BTreeSet::new();
        for r in &records {
            if !seen.insert(r.path.as_str()) {
                return Err(DataError::DuplicatePath(r.path.clone()));
            }
        }
        Ok(Self {
            root: root.into(),
            records,
        })
    }

    /// Absolute location of a record's image file.
    pub fn resolve(&self, record: &SampleRecord) -> PathBuf {
        self.root.join(&record.path)
    }

    pub fn counts(&self) -> ClassCounts {
        let mut c = ClassCounts::default();
        for r in &self.records {
            match (r.label, r.modality) {
                (Label::Covid, Modality::Ct) => c.ct_covid += 1,
                (Label::NonCovid, Modality::Ct) => c.ct_noncovid += 1,
                (Label::Covid, Modality::Xray) => c.xray_covid += 1,
                (Label::NonCovid, Modality::Xray) => c.xray_noncovid += 1,
            }
        }
        c
    }

    pub fn split_records(&self, split: Split) -> Vec<&SampleRecord> {
        self.records.iter().filter(|r| r.split == split).collect()
    }

    pub fn split_len(&self, split: Split) -> usize {
        self.records.iter().filter(|r| r.split == split).count()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| DataError::io(path, e))?;
        let mut w = csv::Writer::from_writer(BufWriter::new(file));
        w.write_record(["path", "label", "modality", "split"])
            .map_err(|e| csv_err(path, e))?;
        // records are kept sorted by construction
        for r in &self.records {
            w.write_record([
                r.path.as_str(),
                r.label.as_str(),
                r.modality.as_str(),
                r.split.as_str(),
            ])
            .map_err(|e| csv_err(path, e))?;
        }
        w.flush().map_err(|e| DataError::io(path, e))?;
        Ok(())
    }

    /// Loads a manifest; relative paths resolve against the file's parent
    /// directory.
    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| DataError::io(path, e))?;
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(BufReader::new(file));
        let headers = reader.headers().map_err(|e| csv_err(path, e))?.clone();
        let expected = ["path", "label", "modality", "split"];
        if headers.iter().collect::<Vec<_>>() != expected {
            return Err(DataError::ManifestParse {
                path: path.to_path_buf(),
                reason: format!("unexpected header {:?}", headers),
            });
        }
        let mut records = Vec::new();
        for row in reader.records() {
            let row = row.map_err(|e| csv_err(path, e))?;
            let field = |i: usize| row.get(i).unwrap_or_default();
            let label = Label::parse(field(1)).ok_or_else(|| DataError::ManifestParse {
                path: path.to_path_buf(),
                reason: format!("unknown label '{}'", field(1)),
            })?;
            let modality = Modality::parse(field(2)).ok_or_else(|| DataError::ManifestParse {
                path: path.to_path_buf(),
                reason: format!("unknown modality '{}'", field(2)),
            })?;
            let split = Split::parse(field(3)).ok_or_else(|| DataError::ManifestParse {
                path: path.to_path_buf(),
                reason: format!("unknown split '{}'", field(3)),
            })?;
            records.push(SampleRecord {
                path: field(0).to_string(),
                label,
                modality,
                split,
            });
        }
        let root = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        Self::new(root, records)
    }
}

fn csv_err(path: &Path, e: csv::Error) -> DataError {
    DataError::ManifestParse {
        path: path.to_path_buf(),
        reason: e.to_string(),
    }
}
