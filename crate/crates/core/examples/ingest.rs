//! Parse a small corpus and print per-sender counts.
use mailsleuth::corpus::{corpus_stats, parse_corpus, AliasTable, CorpusFormat};

const CSV: &str = "\
id,date,sender,recipients,subject,body
1,2001-05-01T09:00:00Z,Kenneth.Lay@enron.com,jeff.skilling@enron.com,Q2,Numbers look fine.
2,\"Tue, 1 May 2001 10:30:00 -0500\",jeff.skilling@enron.com,kenneth.lay@enron.com;sherron.watkins@enron.com,Re: Q2,Agreed.
3,not a date,someone@enron.com,x@enron.com,broken,This row is dropped.
";

fn main() -> mailsleuth::Result<()> {
    let (corpus, report) = parse_corpus(CSV.as_bytes(), CorpusFormat::Csv, AliasTable::executive_roster())?;
    println!("read {} rows, dropped {}", report.rows_read, report.rows_dropped);
    for d in &report.drop_reasons {
        println!("  row {}: {}", d.row, d.reason);
    }
    let stats = corpus_stats(&corpus);
    for (person, n) in &stats.per_sender_counts {
        println!("{person}: {n} sent");
    }
    Ok(())
}
