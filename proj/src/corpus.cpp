#include "citeimpact/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "citeimpact/errors.hpp"

namespace citeimpact::corpus {

using nlohmann::json;

const PaperRecord& Corpus::paper(const std::string& id) const {
    auto it = paper_index.find(id);
    if (it == paper_index.end()) {
        throw not_found_error("unknown paper id: " + id);
    }
    return papers[it->second];
}

const PaperRecord* Corpus::find_paper(const std::string& id) const {
    auto it = paper_index.find(id);
    return it == paper_index.end() ? nullptr : &papers[it->second];
}

const CiterStub* Corpus::citer_info(const std::string& id) const {
    auto it = citer_stubs.find(id);
    return it == citer_stubs.end() ? nullptr : &it->second;
}

void Corpus::rebuild_indexes() {
    paper_index.clear();
    author_papers.clear();
    for (std::size_t i = 0; i < papers.size(); ++i) {
        paper_index.emplace(papers[i].id, i);
    }
    for (std::size_t i = 0; i < papers.size(); ++i) {
        for (const auto& a : papers[i].authors) {
            author_papers[a].push_back(i);
        }
    }
}

namespace {

json parse_line(const std::string& line, const char* stream_name, std::int64_t line_no) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw parse_error(std::string(stream_name) + ": unreadable record at line " +
                          std::to_string(line_no));
    }
    return j;
}

bool get_string(const json& j, const char* key, std::string& out) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) return false;
    out = it->get<std::string>();
    return true;
}

bool get_int(const json& j, const char* key, int& out) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number_integer()) return false;
    out = it->get<int>();
    return true;
}

bool get_string_list(const json& j, const char* key, std::vector<std::string>& out) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_array()) return false;
    out.clear();
    for (const auto& e : *it) {
        if (!e.is_string()) return false;
        out.push_back(e.get<std::string>());
    }
    return true;
}

}  // namespace

void Corpus::rebuild_citation_index() {
    in_citations.clear();
    for (const auto& p : papers) {
        for (const auto& ref : p.references) {
            if (paper_index.count(ref)) {
                in_citations[ref].push_back({p.id, p.year});
            }
            // Dangling references stay on the record but enter no count.
        }
    }
    for (auto& [id, entries] : in_citations) {
        std::sort(entries.begin(), entries.end(), [](const CitingEntry& a, const CitingEntry& b) {
            return a.year != b.year ? a.year < b.year : a.citing_id < b.citing_id;
        });
    }
}

Corpus ingest(std::istream& papers_stream, std::istream& authors_stream,
              std::istream& venues_stream, std::istream& contexts_stream,
              const IngestOptions& opts) {
    Corpus c;
    std::string line;
    std::int64_t line_no = 0;

    while (std::getline(papers_stream, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = parse_line(line, "papers", line_no);
        PaperRecord p;
        bool ok = get_string(j, "id", p.id) && get_string(j, "title", p.title) &&
                  get_string(j, "abstract", p.abstract_text) &&
                  get_string_list(j, "authors", p.authors) && get_string(j, "venue", p.venue) &&
                  get_int(j, "year", p.year) && get_string_list(j, "references", p.references);
        if (!ok || p.id.empty() || p.title.empty() || p.abstract_text.empty() ||
            p.venue.empty() || p.authors.empty()) {
            ++c.rejection_log["missing_field"];
            continue;
        }
        if (p.year < opts.year_min || p.year > opts.year_max) {
            ++c.rejection_log["year_out_of_range"];
            continue;
        }
        if (c.paper_index.count(p.id)) {
            throw parse_error("papers: duplicate id '" + p.id + "' at line " +
                              std::to_string(line_no));
        }
        // Self-references violate the record invariant; drop the edge only.
        auto before = p.references.size();
        p.references.erase(std::remove(p.references.begin(), p.references.end(), p.id),
                           p.references.end());
        if (p.references.size() != before) {
            ++c.rejection_log["self_reference_edge"];
        }
        c.paper_index.emplace(p.id, c.papers.size());
        c.papers.push_back(std::move(p));
    }

    line_no = 0;
    while (std::getline(authors_stream, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = parse_line(line, "authors", line_no);
        std::string id, name;
        if (!get_string(j, "id", id) || !get_string(j, "name", name) || id.empty()) {
            ++c.rejection_log["author_missing_field"];
            continue;
        }
        if (c.author_names.count(id)) {
            throw parse_error("authors: duplicate id '" + id + "' at line " +
                              std::to_string(line_no));
        }
        c.author_names.emplace(id, name);
    }

    line_no = 0;
    while (std::getline(venues_stream, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = parse_line(line, "venues", line_no);
        std::string id, name;
        if (!get_string(j, "id", id) || !get_string(j, "name", name) || id.empty()) {
            ++c.rejection_log["venue_missing_field"];
            continue;
        }
        if (c.venue_names.count(id)) {
            throw parse_error("venues: duplicate id '" + id + "' at line " +
                              std::to_string(line_no));
        }
        c.venue_names.emplace(id, name);
    }

    line_no = 0;
    while (std::getline(contexts_stream, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = parse_line(line, "contexts", line_no);
        CitationContextRecord r;
        bool ok = get_string(j, "citing", r.citing) && get_string(j, "cited", r.cited) &&
                  get_string(j, "context", r.context_text) && get_int(j, "count_x", r.count_x) &&
                  get_int(j, "cite_words", r.cite_words);
        if (!ok || r.citing.empty() || r.cited.empty() || r.citing == r.cited || r.count_x < 1 ||
            r.cite_words < 0) {
            ++c.rejection_log["context_invalid"];
            continue;
        }
        c.contexts[{r.citing, r.cited}] = std::move(r);
    }

    c.rebuild_citation_index();
    c.rebuild_indexes();
    return c;
}

int horizon(const Corpus& corpus) {
    int h = 0;
    for (const auto& p : corpus.papers) h = std::max(h, p.year);
    for (const auto& [id, entries] : corpus.in_citations) {
        if (!entries.empty()) h = std::max(h, entries.back().year);
    }
    return h;
}

Corpus ingest_files(const std::string& papers_path, const std::string& authors_path,
                    const std::string& venues_path, const std::string& contexts_path,
                    const IngestOptions& opts) {
    std::ifstream pf(papers_path), af(authors_path), vf(venues_path), cf(contexts_path);
    if (!pf) throw parse_error("cannot open " + papers_path);
    if (!af) throw parse_error("cannot open " + authors_path);
    if (!vf) throw parse_error("cannot open " + venues_path);
    if (!cf) throw parse_error("cannot open " + contexts_path);
    return ingest(pf, af, vf, cf, opts);
}

Corpus filter(const Corpus& corpus, int delta) {
    if (delta < 0) {
        throw std::invalid_argument("filter: delta must be >= 0");
    }
    Corpus out;
    out.author_names = corpus.author_names;
    out.venue_names = corpus.venue_names;
    out.rejection_log = corpus.rejection_log;

    std::set<std::string> retained;
    for (const auto& p : corpus.papers) {
        auto it = corpus.in_citations.find(p.id);
        if (it == corpus.in_citations.end()) continue;
        for (const auto& e : it->second) {
            if (e.year >= p.year && e.year <= p.year + delta) {
                retained.insert(p.id);
                break;
            }
        }
    }

    for (const auto& p : corpus.papers) {
        if (retained.count(p.id)) {
            out.paper_index.emplace(p.id, out.papers.size());
            out.papers.push_back(p);
        }
    }
    // In-citations into retained papers are kept whole, including entries from
    // papers that were just dropped; those citers are preserved as stubs.
    for (const auto& p : out.papers) {
        auto it = corpus.in_citations.find(p.id);
        if (it != corpus.in_citations.end()) {
            out.in_citations.emplace(p.id, it->second);
        }
    }
    out.citer_stubs = corpus.citer_stubs;
    for (const auto& [id, entries] : out.in_citations) {
        for (const auto& e : entries) {
            if (retained.count(e.citing_id) || out.citer_stubs.count(e.citing_id)) continue;
            const PaperRecord* src = corpus.find_paper(e.citing_id);
            if (src != nullptr) {
                out.citer_stubs.emplace(e.citing_id, CiterStub{src->year, src->authors});
            }
        }
    }
    for (const auto& [key, rec] : corpus.contexts) {
        if (retained.count(key.second)) {
            out.contexts.emplace(key, rec);
        }
    }
    out.rebuild_indexes();
    return out;
}

int citations_in_window(const Corpus& corpus, const std::string& paper_id, int y_start, int y_end) {
    if (y_start > y_end) {
        throw std::invalid_argument("citations_in_window: y_start > y_end");
    }
    if (!corpus.has_paper(paper_id)) {
        throw not_found_error("citations_in_window: unknown paper id " + paper_id);
    }
    auto it = corpus.in_citations.find(paper_id);
    if (it == corpus.in_citations.end()) return 0;
    int n = 0;
    for (const auto& e : it->second) {
        if (e.year >= y_start && e.year <= y_end) ++n;
    }
    return n;
}

CorpusStats stats(const Corpus& corpus) {
    CorpusStats s;
    s.n_papers = static_cast<std::int64_t>(corpus.papers.size());
    s.n_contexts = static_cast<std::int64_t>(corpus.contexts.size());
    std::set<std::string> authors;
    for (const auto& p : corpus.papers) {
        authors.insert(p.authors.begin(), p.authors.end());
        if (s.n_papers > 0) {
            if (s.year_min == 0 || p.year < s.year_min) s.year_min = p.year;
            if (p.year > s.year_max) s.year_max = p.year;
        }
    }
    s.n_authors = static_cast<std::int64_t>(authors.size());
    return s;
}

// ---------------------------------------------------------------------------
// Binary snapshot
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'E', 'C', 'C', 'O'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void put_i64(std::ostream& os, std::int64_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void put_i32(std::ostream& os, std::int32_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void put_str(std::ostream& os, const std::string& s) {
    put_u32(os, static_cast<std::uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}
void put_str_list(std::ostream& os, const std::vector<std::string>& v) {
    put_u32(os, static_cast<std::uint32_t>(v.size()));
    for (const auto& s : v) put_str(os, s);
}

std::uint32_t get_u32(std::istream& is) {
    std::uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}
std::int64_t get_i64(std::istream& is) {
    std::int64_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}
std::int32_t get_i32(std::istream& is) {
    std::int32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}
std::string get_str(std::istream& is) {
    std::uint32_t n = get_u32(is);
    std::string s(n, '\0');
    is.read(s.data(), n);
    return s;
}
std::vector<std::string> get_str_list(std::istream& is) {
    std::uint32_t n = get_u32(is);
    std::vector<std::string> v(n);
    for (auto& s : v) s = get_str(is);
    return v;
}

}  // namespace

void save_snapshot(const Corpus& corpus, const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw parse_error("cannot open for write: " + path);
    os.write(kMagic, 4);
    put_u32(os, kVersion);

    put_u32(os, static_cast<std::uint32_t>(corpus.papers.size()));
    for (const auto& p : corpus.papers) {
        put_str(os, p.id);
        put_str(os, p.title);
        put_str(os, p.abstract_text);
        put_str_list(os, p.authors);
        put_str(os, p.venue);
        put_i32(os, p.year);
        put_str_list(os, p.references);
    }
    put_u32(os, static_cast<std::uint32_t>(corpus.author_names.size()));
    for (const auto& [id, name] : corpus.author_names) {
        put_str(os, id);
        put_str(os, name);
    }
    put_u32(os, static_cast<std::uint32_t>(corpus.venue_names.size()));
    for (const auto& [id, name] : corpus.venue_names) {
        put_str(os, id);
        put_str(os, name);
    }
    put_u32(os, static_cast<std::uint32_t>(corpus.in_citations.size()));
    {
        // Stable on-disk order.
        std::vector<std::string> keys;
        keys.reserve(corpus.in_citations.size());
        for (const auto& [id, _] : corpus.in_citations) keys.push_back(id);
        std::sort(keys.begin(), keys.end());
        for (const auto& id : keys) {
            const auto& entries = corpus.in_citations.at(id);
            put_str(os, id);
            put_u32(os, static_cast<std::uint32_t>(entries.size()));
            for (const auto& e : entries) {
                put_str(os, e.citing_id);
                put_i32(os, e.year);
            }
        }
    }
    put_u32(os, static_cast<std::uint32_t>(corpus.contexts.size()));
    for (const auto& [key, r] : corpus.contexts) {
        put_str(os, r.citing);
        put_str(os, r.cited);
        put_str(os, r.context_text);
        put_i32(os, r.count_x);
        put_i32(os, r.cite_words);
    }
    put_u32(os, static_cast<std::uint32_t>(corpus.citer_stubs.size()));
    {
        std::vector<std::string> keys;
        keys.reserve(corpus.citer_stubs.size());
        for (const auto& [id, _] : corpus.citer_stubs) keys.push_back(id);
        std::sort(keys.begin(), keys.end());
        for (const auto& id : keys) {
            const auto& stub = corpus.citer_stubs.at(id);
            put_str(os, id);
            put_i32(os, stub.year);
            put_str_list(os, stub.authors);
        }
    }
    put_u32(os, static_cast<std::uint32_t>(corpus.rejection_log.size()));
    for (const auto& [reason, count] : corpus.rejection_log) {
        put_str(os, reason);
        put_i64(os, count);
    }
    if (!os) throw parse_error("write failed: " + path);
}

Corpus load_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw parse_error("cannot open snapshot: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::string(magic, 4) != std::string(kMagic, 4)) {
        throw parse_error("bad snapshot magic: " + path);
    }
    std::uint32_t version = get_u32(is);
    if (version != kVersion) {
        throw parse_error("unsupported snapshot version " + std::to_string(version));
    }
    Corpus c;
    std::uint32_t n_papers = get_u32(is);
    c.papers.resize(n_papers);
    for (auto& p : c.papers) {
        p.id = get_str(is);
        p.title = get_str(is);
        p.abstract_text = get_str(is);
        p.authors = get_str_list(is);
        p.venue = get_str(is);
        p.year = get_i32(is);
        p.references = get_str_list(is);
    }
    std::uint32_t n_authors = get_u32(is);
    for (std::uint32_t i = 0; i < n_authors; ++i) {
        std::string id = get_str(is);
        c.author_names.emplace(std::move(id), get_str(is));
    }
    std::uint32_t n_venues = get_u32(is);
    for (std::uint32_t i = 0; i < n_venues; ++i) {
        std::string id = get_str(is);
        c.venue_names.emplace(std::move(id), get_str(is));
    }
    std::uint32_t n_incite = get_u32(is);
    for (std::uint32_t i = 0; i < n_incite; ++i) {
        std::string id = get_str(is);
        std::uint32_t n = get_u32(is);
        std::vector<CitingEntry> entries(n);
        for (auto& e : entries) {
            e.citing_id = get_str(is);
            e.year = get_i32(is);
        }
        c.in_citations.emplace(std::move(id), std::move(entries));
    }
    std::uint32_t n_ctx = get_u32(is);
    for (std::uint32_t i = 0; i < n_ctx; ++i) {
        CitationContextRecord r;
        r.citing = get_str(is);
        r.cited = get_str(is);
        r.context_text = get_str(is);
        r.count_x = get_i32(is);
        r.cite_words = get_i32(is);
        c.contexts.emplace(std::make_pair(r.citing, r.cited), std::move(r));
    }
    std::uint32_t n_stubs = get_u32(is);
    for (std::uint32_t i = 0; i < n_stubs; ++i) {
        std::string id = get_str(is);
        CiterStub stub;
        stub.year = get_i32(is);
        stub.authors = get_str_list(is);
        c.citer_stubs.emplace(std::move(id), std::move(stub));
    }
    std::uint32_t n_rej = get_u32(is);
    for (std::uint32_t i = 0; i < n_rej; ++i) {
        std::string reason = get_str(is);
        c.rejection_log.emplace(std::move(reason), get_i64(is));
    }
    if (!is) throw parse_error("truncated snapshot: " + path);
    c.rebuild_indexes();
    return c;
}

}  // namespace citeimpact::corpus
