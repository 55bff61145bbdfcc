#include "common.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

namespace cli {

int exit_code_for(irf_status s) {
  switch (s) {
    case IRF_OK: return kExitOk;
    case IRF_E_PARAMETER: return kExitUsage;
    case IRF_E_DEGENERATE: return kExitNumerical;
    case IRF_E_DIMENSION:
    case IRF_E_FORMAT:
    case IRF_E_DOMAIN:
    case IRF_E_IO:
    case IRF_E_INTERNAL: return kExitData;
  }
  return kExitData;
}

void check(irf_status s, const std::string& context) {
  if (s == IRF_OK) return;
  throw CliError(exit_code_for(s), context + ": " + irf_status_name(s) + ": " + irf_last_error());
}

SequencePtr load_sequence(const std::filesystem::path& path) {
  irf_sequence* s = nullptr;
  check(irf_sequence_load(path.string().c_str(), &s), "loading " + path.string());
  return SequencePtr(s);
}

MaskPtr load_mask(const std::filesystem::path& path) {
  irf_mask* m = nullptr;
  check(irf_mask_load(path.string().c_str(), &m), "loading " + path.string());
  return MaskPtr(m);
}

MaskPtr copy_mask(const irf_mask* src) {
  irf_mask* m = nullptr;
  check(irf_mask_copy(src, &m), "copying mask");
  return MaskPtr(m);
}

ImageBuf load_image(const std::filesystem::path& path) {
  ImageBuf im;
  const std::string p = path.string();
  if (path.extension() == ".thrm") {
    check(irf_matrix_load(p.c_str(), &im.rows, &im.cols, nullptr, 0), "loading " + p);
    im.data.resize(im.rows * im.cols);
    check(irf_matrix_load(p.c_str(), &im.rows, &im.cols, im.data.data(), im.data.size()), "loading " + p);
  } else {
    check(irf_image_load_pgm(p.c_str(), &im.rows, &im.cols, nullptr, 0), "loading " + p);
    im.data.resize(im.rows * im.cols);
    check(irf_image_load_pgm(p.c_str(), &im.rows, &im.cols, im.data.data(), im.data.size()),
          "loading " + p);
  }
  return im;
}

std::string sha256_bytes(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw CliError(kExitData, "SHA-256 computation failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw CliError(kExitData, "cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_bytes(read_text(path)); }

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw CliError(kExitData, "cannot write " + tmp.string());
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f) throw CliError(kExitData, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw CliError(kExitData, "cannot rename " + tmp.string() + ": " + ec.message());
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  write_text_atomic(path, j.dump(2) + "\n");
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_field(fields[i]);
  }
  return out + "\r\n";
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
      continue;
    }
    if (ch == '"') {
      quoted = true;
      any = true;
    } else if (ch == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (ch == '\r') {
      continue;
    } else if (ch == '\n') {
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else {
      field += ch;
      any = true;
    }
  }
  if (quoted) throw CliError(kExitData, "CSV: unterminated quoted field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  std::vector<std::exception_ptr> errors(n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
        break;
      }
    }
  } else {
    std::mutex mu;
    std::size_t next = 0;
    bool stop = false;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          std::size_t i;
          {
            std::lock_guard<std::mutex> lock(mu);
            if (stop || next >= n) return;
            i = next++;
          }
          try {
            body(i);
          } catch (...) {
            std::lock_guard<std::mutex> lock(mu);
            errors[i] = std::current_exception();
            stop = true;
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

nlohmann::json hash_tree(const std::filesystem::path& dir, const std::string& skip) {
  std::vector<std::string> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const std::string rel = e.path().lexically_relative(dir).generic_string();
    if (rel == skip || rel.ends_with(".tmp")) continue;
    files.push_back(rel);
  }
  std::sort(files.begin(), files.end());
  nlohmann::json out = nlohmann::json::object();
  for (const auto& f : files) out[f] = sha256_file(dir / f);
  return out;
}

std::string display_path(const std::filesystem::path& p, const std::filesystem::path& base) {
  std::error_code ec;
  const auto a = std::filesystem::weakly_canonical(p, ec);
  const auto b = std::filesystem::weakly_canonical(base, ec);
  const auto rel = a.lexically_relative(b);
  if (!rel.empty() && *rel.begin() != "..") return rel.generic_string();
  return p.filename().generic_string();
}

}  // namespace cli
