#ifndef CITEIMPACT_TEST_FIXTURES_HPP
#define CITEIMPACT_TEST_FIXTURES_HPP

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "citeimpact/corpus.hpp"

namespace fixtures {

struct Paper {
    std::string id;
    int year = 2000;
    std::vector<std::string> authors;
    std::vector<std::string> refs;
    std::string title = "citation flow in scholarly networks";
    std::string abstract_text = "we analyze citation behavior across publication years";
    std::string venue = "v1";
};

struct Context {
    std::string citing;
    std::string cited;
    int count_x = 1;
    int cite_words = 0;
    std::string text = "as shown previously";
};

inline std::string papers_jsonl(const std::vector<Paper>& papers) {
    std::ostringstream os;
    for (const auto& p : papers) {
        nlohmann::json j{{"id", p.id},         {"title", p.title},
                         {"abstract", p.abstract_text}, {"authors", p.authors},
                         {"venue", p.venue},   {"year", p.year},
                         {"references", p.refs}};
        os << j.dump() << '\n';
    }
    return os.str();
}

inline std::string contexts_jsonl(const std::vector<Context>& contexts) {
    std::ostringstream os;
    for (const auto& c : contexts) {
        nlohmann::json j{{"citing", c.citing},
                         {"cited", c.cited},
                         {"context", c.text},
                         {"count_x", c.count_x},
                         {"cite_words", c.cite_words}};
        os << j.dump() << '\n';
    }
    return os.str();
}

inline citeimpact::corpus::Corpus make_corpus(const std::vector<Paper>& papers,
                                              const std::vector<Context>& contexts = {}) {
    std::istringstream ps(papers_jsonl(papers));
    std::istringstream as;
    std::istringstream vs;
    std::istringstream cs(contexts_jsonl(contexts));
    return citeimpact::corpus::ingest(ps, as, vs, cs);
}

// Unique scratch path under the system temp directory; removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        dir_ = std::filesystem::temp_directory_path() /
               ("citeimpact_test_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::remove_all(dir_);
        std::filesystem::create_directories(dir_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(dir_, ec);
    }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }
    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
};

inline std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

}  // namespace fixtures

#endif
