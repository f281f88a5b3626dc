// SPDX-License-Identifier: Apache-2.0

//! ASCII interchange with external test suites.

use std::path::Path;

use crate::error::Result;
use crate::extraction::{load_ascii, save_ascii};
use crate::stats::sequence::BitSequence;

/// Writes `'0'`/`'1'` bytes with no separators.
pub fn export_sts(seq: &BitSequence, path: impl AsRef<Path>) -> Result<()> {
    save_ascii(seq.bits(), path)
}

pub fn import_sts(path: impl AsRef<Path>) -> Result<BitSequence> {
    BitSequence::new(load_ascii(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.txt");
        let s: BitSequence = "10110001".parse().unwrap();
        export_sts(&s, &p).unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"10110001");
        assert_eq!(import_sts(&p).unwrap(), s);
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(
            import_sts("/nonexistent/sts.txt"),
            Err(crate::Error::Io(_))
        ));
    }
}
