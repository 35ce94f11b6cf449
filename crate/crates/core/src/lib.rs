//! Longitudinal analysis of abusive and inappropriate content in chart-music
//! lyrics.
//!
//! The library walks a corpus of weekly chart entries through six stages:
//! ingesting and deduplicating chart rows, enriching them with lyrics and
//! metadata from providers, filtering to English-language songs from the
//! study window, structural parsing of lyrics into sections and fixed-budget
//! chunks, multi-label emotion classification, and finally polarity scoring
//! and trend aggregation across years, decades, and genres.
//!
//! Each stage is its own module with a narrow interface; the `cli` module
//! wires them into subcommands and the binary stays a thin argument parser.

pub mod abuse;
pub mod cli;
pub mod corpus;
pub mod langid;
pub mod lyricdoc;
pub mod ngram;
pub mod normalize;
pub mod polarity;
pub mod sentiment;
pub mod trends;
