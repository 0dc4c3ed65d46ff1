#include "manifest.hpp"

#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include <openssl/evp.h>

#include "fhl/error.hpp"
#include "fhl/parallel.hpp"
#include "fhl/simd/kernels.hpp"

namespace fhl::cli {

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot hash " + path);
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("sha256 init failed");
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md, &len);
    std::ostringstream hex;
    for (unsigned i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return hex.str();
}

nlohmann::json RunManifest::to_json() const {
    nlohmann::json j{{"command", command},
                     {"version", kVersion},
                     {"parameters", parameters},
                     {"replay_config", replay_config},
                     {"threads", worker_count()},
                     {"kernels", simd::active_kernels().name},
                     {"wall_time", wall_seconds},
                     {"results", results}};
    j["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
    auto digests = [](const std::vector<std::string>& files) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& f : files) a.push_back({{"path", f}, {"sha256", sha256_file(f)}});
        return a;
    };
    j["inputs"] = digests(inputs);
    j["outputs"] = digests(outputs);
    return j;
}

void RunManifest::write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << to_json().dump(2) << '\n';
}

}  // namespace fhl::cli
