#include "tablex/ocr.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "tablex/codec.hpp"
#include "tablex/error.hpp"

namespace tablex {

OcrManifest parse_manifest(const nlohmann::json& doc) {
  OcrManifest manifest;
  try {
    for (const auto& [page_id, words] : doc.at("pages").items()) {
      auto& list = manifest[page_id];
      for (const auto& w : words) {
        const auto& b = w.at("bbox");
        if (!b.is_array() || b.size() != 4) {
          throw FormatError("manifest word bbox must have 4 numbers");
        }
        list.push_back({{b[0].get<double>(), b[1].get<double>(),
                         b[2].get<double>(), b[3].get<double>()},
                        w.at("text").get<std::string>()});
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("OCR manifest: ") + e.what());
  }
  return manifest;
}

OcrManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open OCR manifest " + path.string());
  try {
    return parse_manifest(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

nlohmann::ordered_json manifest_to_json(const OcrManifest& manifest) {
  nlohmann::ordered_json pages = nlohmann::ordered_json::object();
  for (const auto& [page_id, words] : manifest) {
    auto& list = pages[page_id] = nlohmann::ordered_json::array();
    for (const auto& w : words) {
      list.push_back({{"bbox", {w.box.x_min, w.box.y_min, w.box.x_max, w.box.y_max}},
                      {"text", w.text}});
    }
  }
  return {{"pages", std::move(pages)}};
}

std::vector<OcrWord> StubOcrEngine::recognize(const GrayImage&,
                                              const BBox& region) {
  std::vector<OcrWord> out;
  for (const auto& w : words_) {
    const double cx = w.box.center_x();
    const double cy = w.box.center_y();
    if (cx >= region.x_min && cx < region.x_max && cy >= region.y_min &&
        cy < region.y_max) {
      const BBox local = clip_box(w.box.translated(-region.x_min, -region.y_min),
                                  region.width(), region.height());
      out.push_back({local, w.text});
    }
  }
  return out;
}

std::vector<OcrWord> parse_word_lines(const std::string& output) {
  std::vector<OcrWord> words;
  std::istringstream in(output);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw OcrError("OCR output line " + std::to_string(lineno) +
                     ": missing tab separator");
    }
    std::istringstream coords(line.substr(0, tab));
    BBox b;
    if (!(coords >> b.x_min >> b.y_min >> b.x_max >> b.y_max)) {
      throw OcrError("OCR output line " + std::to_string(lineno) +
                     ": expected four coordinates");
    }
    words.push_back({b, line.substr(tab + 1)});
  }
  return words;
}

SubprocessOcrEngine::SubprocessOcrEngine(std::filesystem::path executable,
                                         std::filesystem::path scratch_dir)
    : executable_(std::move(executable)), scratch_dir_(std::move(scratch_dir)) {
  std::filesystem::create_directories(scratch_dir_);
}

std::vector<OcrWord> SubprocessOcrEngine::recognize(const GrayImage& image,
                                                    const BBox&) {
  std::lock_guard lock(mutex_);
  const auto crop_path = scratch_dir_ / ("ocr_" + std::to_string(::getpid()) +
                                         "_" + std::to_string(calls_++) + ".png");
  write_png(crop_path, image);

  int pipe_fds[2];
  if (::pipe(pipe_fds) != 0) {
    throw OcrError(std::string("pipe: ") + std::strerror(errno));
  }
  const pid_t pid = ::fork();
  if (pid < 0) {
    ::close(pipe_fds[0]);
    ::close(pipe_fds[1]);
    throw OcrError(std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    ::dup2(pipe_fds[1], STDOUT_FILENO);
    ::close(pipe_fds[0]);
    ::close(pipe_fds[1]);
    const std::string exe = executable_.string();
    const std::string arg = crop_path.string();
    char* argv[] = {const_cast<char*>(exe.c_str()), const_cast<char*>(arg.c_str()),
                    nullptr};
    ::execv(exe.c_str(), argv);
    ::_exit(127);
  }
  ::close(pipe_fds[1]);
  std::string output;
  std::array<char, 4096> buf;
  ssize_t n;
  while ((n = ::read(pipe_fds[0], buf.data(), buf.size())) > 0 ||
         (n < 0 && errno == EINTR)) {
    if (n > 0) output.append(buf.data(), static_cast<std::size_t>(n));
  }
  ::close(pipe_fds[0]);
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  std::error_code ignored;
  std::filesystem::remove(crop_path, ignored);

  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    throw OcrError(executable_.string() + " exited with status " +
                   std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : -1));
  }
  auto words = parse_word_lines(output);
  const BBox bounds{0, 0, double(image.width()), double(image.height())};
  for (auto& w : words) w.box = clip_box(w.box, bounds.x_max, bounds.y_max);
  return words;
}

}  // namespace tablex
