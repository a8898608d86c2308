use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::BitString;
use crate::model::SystemParams;
use crate::placement::mix64;

/// Domain separator so file contents never share a stream with placement.
const FILE_DOMAIN: u64 = 0x6669_6c65_7374_6f72;

/// The server's library: `N` pseudorandom files of `F` bits each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileStore {
    file_bits: usize,
    files: Vec<BitString>,
}

impl FileStore {
    /// Generates the library deterministically from `params.seed`.
    pub fn generate(params: &SystemParams) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(mix64(params.seed ^ FILE_DOMAIN));
        let words = params.file_bits.div_ceil(64);
        let files = (0..params.num_files)
            .map(|n| {
                rng.set_stream(n as u64);
                rng.set_word_pos(0);
                let raw: Vec<u64> = (0..words).map(|_| rng.next_u64()).collect();
                BitString::from_words(params.file_bits, raw)
            })
            .collect();
        Self {
            file_bits: params.file_bits,
            files,
        }
    }

    pub fn from_files(files: Vec<BitString>) -> Self {
        let file_bits = files.first().map_or(0, BitString::len);
        assert!(
            files.iter().all(|f| f.len() == file_bits),
            "all files must have equal length"
        );
        Self { file_bits, files }
    }

    pub fn num_files(&self) -> usize {
        self.files.len()
    }

    pub fn file_bits(&self) -> usize {
        self.file_bits
    }

    pub fn file(&self, n: usize) -> &BitString {
        &self.files[n]
    }

    #[inline]
    pub fn bit(&self, n: usize, b: usize) -> bool {
        self.files[n].get(b)
    }

    /// Splits every file into `segments` consecutive pieces; segment `j` of
    /// file `n` becomes file `n * segments + j`.
    pub fn segmented(&self, segments: usize) -> FileStore {
        assert!(segments > 0 && self.file_bits.is_multiple_of(segments));
        let seg_bits = self.file_bits / segments;
        let files = self
            .files
            .iter()
            .flat_map(|f| (0..segments).map(move |j| f.slice(j * seg_bits, seg_bits)))
            .collect();
        FileStore {
            file_bits: seg_bits,
            files,
        }
    }
}
