//! WAV and CSV input/output.

mod csv;
mod wav;

pub use self::csv::{format_significant, read_csv, render_csv, write_csv, CsvTable};
pub use self::wav::{read_wav, to_mono, write_wav, AudioFile, MonoMode, SampleFormat};
