//! Line-oriented certificate records: persisted, independently re-verifiable
//! witnesses that one subset was solved.
//!
//! One record per line, UTF-8, `\n` terminated, fields separated by `;`:
//!
//! ```text
//! n=8;mode=distinct;set=1,2,3;ord=1,3,2;method=constructive;tries=1
//! ```
//!
//! `set` lists the subset ascending, `ord` the witness ordering. Parsers
//! reject unknown keys, reordered keys, and duplicate fields.

use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::solvers::SolveMethod;
use crate::zn::{Modulus, Ordering, Subset, ValidationMode};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub n: u64,
    pub mode: ValidationMode,
    pub set: Vec<u64>,
    pub ordering: Vec<u64>,
    pub method: SolveMethod,
    pub tries: u64,
}

impl Certificate {
    /// The canonical one-line form.
    pub fn to_line(&self) -> String {
        format!(
            "n={};mode={};set={};ord={};method={};tries={}",
            self.n,
            self.mode,
            join(&self.set),
            join(&self.ordering),
            self.method,
            self.tries
        )
    }

    /// Strict syntactic parse of one line. Structural validity is a separate
    /// step ([`Certificate::check`]).
    pub fn parse_line(line: &str) -> Result<Certificate, String> {
        let fields: Vec<&str> = line.split(';').collect();
        if fields.len() != 6 {
            return Err(format!(
                "expected 6 ';'-separated fields, got {}",
                fields.len()
            ));
        }
        let n = take(fields[0], "n")?
            .parse::<u64>()
            .map_err(|e| format!("bad n: {e}"))?;
        let mode = take(fields[1], "mode")?
            .parse::<ValidationMode>()
            .map_err(|e| format!("bad mode: {e}"))?;
        let set = parse_list(take(fields[2], "set")?)?;
        let ordering = parse_list(take(fields[3], "ord")?)?;
        let method = take(fields[4], "method")?
            .parse::<SolveMethod>()
            .map_err(|e| format!("bad method: {e}"))?;
        let tries = take(fields[5], "tries")?
            .parse::<u64>()
            .map_err(|e| format!("bad tries: {e}"))?;
        Ok(Certificate {
            n,
            mode,
            set,
            ordering,
            method,
            tries,
        })
    }

    /// Re-validates the witness: the set must be a valid ascending subset,
    /// the ordering a permutation of it satisfying the recorded mode.
    pub fn check(&self) -> Result<(), String> {
        let modulus = Modulus::new(self.n).map_err(|e| e.to_string())?;
        let subset = Subset::new(modulus, self.set.clone()).map_err(|e| e.to_string())?;
        let ordering =
            Ordering::of_subset(&subset, self.ordering.clone()).map_err(|e| e.to_string())?;
        if !ordering.is_sequencing(self.mode) {
            return Err(format!(
                "ordering {ordering} mod {} violates mode {}",
                self.n, self.mode
            ));
        }
        if self.tries == 0 {
            return Err("tries must be at least 1".into());
        }
        Ok(())
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_line())
    }
}

fn join(xs: &[u64]) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn take<'a>(field: &'a str, key: &str) -> Result<&'a str, String> {
    match field.split_once('=') {
        Some((k, v)) if k == key => Ok(v),
        Some((k, _)) => Err(format!("expected key {key:?}, got {k:?}")),
        None => Err(format!("field {field:?} has no '='")),
    }
}

fn parse_list(s: &str) -> Result<Vec<u64>, String> {
    if s.is_empty() {
        return Err("empty element list".into());
    }
    s.split(',')
        .map(|tok| {
            tok.parse::<u64>()
                .map_err(|e| format!("bad element {tok:?}: {e}"))
        })
        .collect()
}

/// One rejected line of a certificate file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvalidRecord {
    /// 1-based line number.
    pub line: u64,
    pub reason: String,
}

/// Outcome of re-validating a certificate file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub records: u64,
    pub invalid: Vec<InvalidRecord>,
}

impl VerificationReport {
    pub fn all_valid(&self) -> bool {
        self.invalid.is_empty()
    }
}

/// Parses and re-validates every line of a certificate file. Malformed or
/// invalid lines are recorded and verification continues; an unreadable file
/// is an immediate error. An empty file is valid with zero records.
pub fn verify_certificates(path: &Path) -> io::Result<VerificationReport> {
    let reader = BufReader::new(File::open(path)?);
    let mut records = 0u64;
    let mut invalid = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        records += 1;
        let line_no = idx as u64 + 1;
        match Certificate::parse_line(&line).and_then(|c| c.check().map(|_| c)) {
            Ok(_) => {}
            Err(reason) => invalid.push(InvalidRecord {
                line: line_no,
                reason,
            }),
        }
    }
    Ok(VerificationReport { records, invalid })
}

/// Serialized certificate writer; records must arrive in rank order.
pub(crate) struct CertificateWriter {
    writer: BufWriter<File>,
    bytes_written: u64,
}

impl CertificateWriter {
    /// Opens for a fresh run (truncating) or resumes at `resume_bytes`,
    /// discarding anything after that offset.
    pub(crate) fn open(path: &Path, resume_bytes: Option<u64>) -> io::Result<Self> {
        let file = match resume_bytes {
            None => File::create(path)?,
            Some(len) => {
                // keep the first `len` bytes; set_len below discards any
                // partial tail from an interrupted epoch
                let file = File::options()
                    .read(true)
                    .write(true)
                    .create(true)
                    .truncate(false)
                    .open(path)?;
                file.set_len(len)?;
                let mut file = file;
                io::Seek::seek(&mut file, io::SeekFrom::End(0))?;
                file
            }
        };
        let bytes_written = resume_bytes.unwrap_or(0);
        Ok(CertificateWriter {
            writer: BufWriter::new(file),
            bytes_written,
        })
    }

    pub(crate) fn write(&mut self, cert: &Certificate) -> io::Result<()> {
        let line = cert.to_line();
        self.writer.write_all(line.as_bytes())?;
        self.writer.write_all(b"\n")?;
        self.bytes_written += line.len() as u64 + 1;
        Ok(())
    }

    pub(crate) fn flush(&mut self) -> io::Result<u64> {
        self.writer.flush()?;
        Ok(self.bytes_written)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Certificate {
        Certificate {
            n: 8,
            mode: ValidationMode::DistinctOnly,
            set: vec![1, 2, 3, 4, 5, 6],
            ordering: vec![1, 6, 3, 4, 5, 2],
            method: SolveMethod::Constructive,
            tries: 1,
        }
    }

    #[test]
    fn line_round_trip() {
        let c = sample();
        let line = c.to_line();
        assert_eq!(
            line,
            "n=8;mode=distinct;set=1,2,3,4,5,6;ord=1,6,3,4,5,2;method=constructive;tries=1"
        );
        assert_eq!(Certificate::parse_line(&line).unwrap(), c);
        c.check().unwrap();
    }

    #[test]
    fn parser_rejects_unknown_and_reordered_keys() {
        let err = Certificate::parse_line("m=8;mode=distinct;set=1;ord=1;method=random;tries=1")
            .unwrap_err();
        assert!(err.contains("expected key \"n\""));

        // keys must appear in canonical order
        let err = Certificate::parse_line("mode=distinct;n=8;set=1;ord=1;method=random;tries=1")
            .unwrap_err();
        assert!(err.contains("expected key \"n\""));

        assert!(Certificate::parse_line("n=8;mode=distinct;set=1;ord=1;method=random").is_err());
        assert!(Certificate::parse_line(
            "n=8;mode=distinct;set=1;ord=1;method=random;tries=1;extra=2"
        )
        .is_err());
    }

    #[test]
    fn check_catches_tampering() {
        let mut c = sample();
        c.ordering = vec![6, 1, 3, 4, 5, 2]; // still a permutation, sums collide?
                                             // ensure the check actually validates sums rather than just shape
        let tampered = Certificate {
            n: 6,
            mode: ValidationMode::DistinctOnly,
            set: vec![1, 3, 5],
            ordering: vec![3, 1, 5], // sums 3, 4, 3
            method: SolveMethod::Random,
            tries: 2,
        };
        assert!(tampered.check().is_err());

        let not_permutation = Certificate {
            ordering: vec![1, 6, 3, 4, 5, 7],
            ..sample()
        };
        assert!(not_permutation.check().is_err());

        let unsorted_set = Certificate {
            set: vec![2, 1, 3, 4, 5, 6],
            ..sample()
        };
        assert!(unsorted_set.check().is_err());
    }

    #[test]
    fn verify_reports_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("certs.txt");
        let good = sample().to_line();
        let bad = "n=6;mode=distinct;set=1,3,5;ord=3,1,5;method=random;tries=2";
        std::fs::write(&path, format!("{good}\ngarbage\n{bad}\n")).unwrap();
        let report = verify_certificates(&path).unwrap();
        assert_eq!(report.records, 3);
        assert_eq!(report.invalid.len(), 2);
        assert_eq!(report.invalid[0].line, 2);
        assert_eq!(report.invalid[1].line, 3);
        assert!(!report.all_valid());
    }

    #[test]
    fn verify_empty_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.txt");
        std::fs::write(&path, "").unwrap();
        let report = verify_certificates(&path).unwrap();
        assert_eq!(report.records, 0);
        assert!(report.all_valid());
    }

    #[test]
    fn verify_unreadable_file_errors() {
        assert!(verify_certificates(Path::new("/nonexistent/certs.txt")).is_err());
    }
}
