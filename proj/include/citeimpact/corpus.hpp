#ifndef CITEIMPACT_CORPUS_HPP
#define CITEIMPACT_CORPUS_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace citeimpact::corpus {

struct PaperRecord {
    std::string id;
    std::string title;
    std::string abstract_text;
    std::vector<std::string> authors;
    std::string venue;
    int year = 0;
    std::vector<std::string> references;
};

struct CitationContextRecord {
    std::string citing;
    std::string cited;
    std::string context_text;
    int count_x = 0;
    int cite_words = 0;
};

struct CitingEntry {
    std::string citing_id;
    int year = 0;
};

// Author list + year of a paper that was dropped by filter() but still cites
// retained papers. Early-citer analytics need the authorship of such papers.
struct CiterStub {
    int year = 0;
    std::vector<std::string> authors;
};

struct CorpusStats {
    std::int64_t n_papers = 0;
    std::int64_t n_authors = 0;
    int year_min = 0;
    int year_max = 0;
    std::int64_t n_contexts = 0;
};

class Corpus {
public:
    // Papers in insertion order; ids are unique.
    std::vector<PaperRecord> papers;
    std::unordered_map<std::string, std::size_t> paper_index;

    std::map<std::string, std::string> author_names;
    std::map<std::string, std::string> venue_names;

    // Inverse citation index over resolved reference edges. Entries may name
    // citing papers that are no longer stored (post-filter); the year travels
    // with the entry so windowed counts never need the citing record.
    std::unordered_map<std::string, std::vector<CitingEntry>> in_citations;

    std::map<std::pair<std::string, std::string>, CitationContextRecord> contexts;
    std::unordered_map<std::string, CiterStub> citer_stubs;
    std::map<std::string, std::int64_t> rejection_log;

    // Built lazily-ish at ingest: author id -> indices of authored papers.
    std::unordered_map<std::string, std::vector<std::size_t>> author_papers;

    bool has_paper(const std::string& id) const { return paper_index.count(id) != 0; }
    const PaperRecord& paper(const std::string& id) const;
    const PaperRecord* find_paper(const std::string& id) const;

    // Year + author list of any paper id that appears as a citer, whether the
    // record is stored or only stubbed.
    const CiterStub* citer_info(const std::string& id) const;

    void rebuild_indexes();

    // Recomputes in_citations from the stored papers' resolved references.
    // Not part of rebuild_indexes(): filtered corpora carry citation entries
    // from stub papers that references alone cannot reconstruct.
    void rebuild_citation_index();
};

struct IngestOptions {
    int year_min = 1859;
    int year_max = 2012;
};

// Streams are line-delimited JSON (one record per line, UTF-8).
Corpus ingest(std::istream& papers_stream, std::istream& authors_stream,
              std::istream& venues_stream, std::istream& contexts_stream,
              const IngestOptions& opts = {});

Corpus ingest_files(const std::string& papers_path, const std::string& authors_path,
                    const std::string& venues_path, const std::string& contexts_path,
                    const IngestOptions& opts = {});

// Keeps exactly the papers with >= 1 stored citation in [T, T+delta]; edges
// and contexts from dropped papers into retained ones survive as stubs.
Corpus filter(const Corpus& corpus, int delta = 2);

int citations_in_window(const Corpus& corpus, const std::string& paper_id,
                        int y_start, int y_end);

CorpusStats stats(const Corpus& corpus);

// Latest observed event year: stored papers and incoming-citation entries.
// Filtered corpora keep citation entries from dropped papers, so this can
// exceed the newest stored record.
int horizon(const Corpus& corpus);

void save_snapshot(const Corpus& corpus, const std::string& path);
Corpus load_snapshot(const std::string& path);

}  // namespace citeimpact::corpus

#endif
