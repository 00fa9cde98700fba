#include <zlib.h>

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "dtwidx/hash.hpp"
#include "dtwidx/index.hpp"
#include "dtwidx/paa.hpp"

namespace dtwidx {

namespace {

constexpr char kMagic[4] = {'D', 'T', 'W', 'I'};
constexpr std::uint32_t kFormatVersion = 1;
constexpr std::uint8_t kInternalNode = 0;
constexpr std::uint8_t kLeafNode = 1;

void put_u8(std::string& buf, std::uint8_t v) {
    buf.push_back(static_cast<char>(v));
}

void put_u32(std::string& buf, std::uint32_t v) {
    for (int k = 0; k < 4; ++k) {
        buf.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
    }
}

void put_u64(std::string& buf, std::uint64_t v) {
    for (int k = 0; k < 8; ++k) {
        buf.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
    }
}

void put_f64(std::string& buf, double v) {
    put_u64(buf, std::bit_cast<std::uint64_t>(v));
}

void patch_u64(std::string& buf, std::size_t at, std::uint64_t v) {
    for (int k = 0; k < 8; ++k) {
        buf[at + static_cast<std::size_t>(k)] =
            static_cast<char>((v >> (8 * k)) & 0xff);
    }
}

std::uint32_t crc_of(const char* data, std::size_t len) {
    uLong crc = crc32(0L, Z_NULL, 0);
    while (len > 0) {
        const std::size_t chunk = std::min<std::size_t>(len, 1u << 30);
        crc = crc32(crc, reinterpret_cast<const Bytef*>(data),
                    static_cast<uInt>(chunk));
        data += chunk;
        len -= chunk;
    }
    return static_cast<std::uint32_t>(crc);
}

class Reader {
public:
    Reader(const char* data, std::size_t size) : data_(data), size_(size) {}

    std::size_t at() const { return at_; }
    std::size_t remaining() const { return size_ - at_; }

    void need(std::size_t n) const {
        if (n > size_ - at_) {
            throw TruncatedError("index file ends before a declared field");
        }
    }

    std::uint8_t u8() {
        need(1);
        return static_cast<std::uint8_t>(data_[at_++]);
    }

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int k = 0; k < 4; ++k) {
            v |= static_cast<std::uint32_t>(
                     static_cast<unsigned char>(data_[at_ + k]))
                 << (8 * k);
        }
        at_ += 4;
        return v;
    }

    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int k = 0; k < 8; ++k) {
            v |= static_cast<std::uint64_t>(
                     static_cast<unsigned char>(data_[at_ + k]))
                 << (8 * k);
        }
        at_ += 8;
        return v;
    }

    double f64() { return std::bit_cast<double>(u64()); }

    std::string_view bytes(std::size_t n) {
        need(n);
        std::string_view out(data_ + at_, n);
        at_ += n;
        return out;
    }

    void seek(std::size_t to) {
        if (to > size_) {
            throw TruncatedError("index file offset out of range");
        }
        at_ = to;
    }

private:
    const char* data_;
    std::size_t size_;
    std::size_t at_ = 0;
};

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string metadata_body(const DtwIndex& index) {
    std::ostringstream out;
    out << "band_radius=" << index.config().band_radius << "\n"
        << "n_paa=" << index.config().n_paa << "\n"
        << "lmax=" << index.lmax() << "\n"
        << "pad_value=" << format_double(index.config().pad_value) << "\n"
        << "node_capacity=" << index.config().node_capacity << "\n"
        << "entry_count=" << index.size() << "\n"
        << "keogh_filter=" << (index.config().keogh_filter ? 1 : 0) << "\n";
    return out.str();
}

std::string hash_line(std::string_view body) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(body)));
    return std::string("params_hash=") + buf + "\n";
}

std::uint64_t write_node(const RTreeNode& node, std::string& buf,
                         std::size_t dims) {
    const std::uint64_t my_offset = buf.size();
    put_u8(buf, node.is_leaf() ? kLeafNode : kInternalNode);
    for (std::size_t d = 0; d < dims; ++d) put_f64(buf, node.box.low[d]);
    for (std::size_t d = 0; d < dims; ++d) put_f64(buf, node.box.high[d]);
    if (node.is_leaf()) {
        put_u32(buf, static_cast<std::uint32_t>(node.entries.size()));
        for (std::uint64_t id : node.entries) put_u64(buf, id);
        return my_offset;
    }
    put_u32(buf, static_cast<std::uint32_t>(node.children.size()));
    const std::size_t slots = buf.size();
    for (std::size_t k = 0; k < node.children.size(); ++k) put_u64(buf, 0);
    for (std::size_t k = 0; k < node.children.size(); ++k) {
        const std::uint64_t child_offset =
            write_node(node.children[k], buf, dims);
        patch_u64(buf, slots + 8 * k, child_offset);
    }
    return my_offset;
}

RTreeNode read_node(Reader& tree, std::uint64_t offset, std::size_t dims,
                    std::size_t& entry_total) {
    tree.seek(offset);
    RTreeNode node;
    const std::uint8_t kind = tree.u8();
    if (kind != kLeafNode && kind != kInternalNode) {
        throw CorruptError("unknown tree node kind");
    }
    node.box.low.resize(dims);
    node.box.high.resize(dims);
    for (std::size_t d = 0; d < dims; ++d) node.box.low[d] = tree.f64();
    for (std::size_t d = 0; d < dims; ++d) node.box.high[d] = tree.f64();
    for (std::size_t d = 0; d < dims; ++d) {
        if (!(node.box.low[d] <= node.box.high[d])) {
            throw CorruptError("inverted bounding box in tree section");
        }
    }
    const std::uint32_t count = tree.u32();
    if (count == 0) {
        throw CorruptError("empty tree node");
    }
    if (kind == kLeafNode) {
        node.entries.reserve(count);
        for (std::uint32_t k = 0; k < count; ++k) {
            node.entries.push_back(tree.u64());
        }
        node.subtree_size = node.entries.size();
        entry_total += node.entries.size();
        return node;
    }
    std::vector<std::uint64_t> offsets(count);
    for (std::uint32_t k = 0; k < count; ++k) offsets[k] = tree.u64();
    node.children.reserve(count);
    for (std::uint64_t child_offset : offsets) {
        if (child_offset <= offset) {
            throw CorruptError("tree child offset does not advance");
        }
        node.children.push_back(
            read_node(tree, child_offset, dims, entry_total));
        node.subtree_size += node.children.back().subtree_size;
    }
    return node;
}

std::map<std::string, std::string, std::less<>> parse_metadata(
    std::string_view text) {
    std::map<std::string, std::string, std::less<>> kv;
    std::size_t at = 0;
    while (at < text.size()) {
        std::size_t nl = text.find('\n', at);
        if (nl == std::string_view::npos) nl = text.size();
        const std::string_view line = text.substr(at, nl - at);
        at = nl + 1;
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw CorruptError("metadata line without key=value shape");
        }
        kv.emplace(std::string(line.substr(0, eq)),
                   std::string(line.substr(eq + 1)));
    }
    return kv;
}

const std::string& require_key(
    const std::map<std::string, std::string, std::less<>>& kv,
    std::string_view key) {
    const auto it = kv.find(key);
    if (it == kv.end()) {
        throw CorruptError("metadata is missing key: " + std::string(key));
    }
    return it->second;
}

std::uint64_t parse_u64_text(const std::string& text) {
    std::size_t used = 0;
    const std::uint64_t v = std::stoull(text, &used, 10);
    if (used != text.size()) {
        throw CorruptError("metadata integer has trailing characters");
    }
    return v;
}

}  // namespace

void save_index(const DtwIndex& index, const std::string& path) {
    std::string file;
    file.append(kMagic, sizeof(kMagic));
    put_u32(file, kFormatVersion);

    const std::string body = metadata_body(index);
    const std::string meta = body + hash_line(body);
    put_u64(file, meta.size());
    file += meta;

    std::string seq_table;
    for (const auto& seq : index.sequences()) {
        put_u64(seq_table, seq.id);
        put_u32(seq_table, static_cast<std::uint32_t>(seq.length()));
        for (double v : seq.values) put_f64(seq_table, v);
    }
    put_u64(file, seq_table.size());
    file += seq_table;

    std::string paa_table;
    for (const auto& vec : index.paa_vectors()) {
        for (double v : vec.coords) put_f64(paa_table, v);
    }
    put_u64(file, paa_table.size());
    file += paa_table;

    std::string tree;
    write_node(index.root(), tree, index.config().n_paa);
    put_u64(file, tree.size());
    file += tree;

    put_u32(file, crc_of(file.data(), file.size()));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IndexIoError("cannot open index file for writing: " + path);
    }
    out.write(file.data(), static_cast<std::streamsize>(file.size()));
    if (!out) {
        throw IndexIoError("failed writing index file: " + path);
    }
}

DtwIndex load_index(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IndexIoError("cannot open index file: " + path);
    }
    std::string file((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw IndexIoError("failed reading index file: " + path);
    }

    Reader header(file.data(), file.size());
    if (std::string_view magic = header.bytes(4);
        std::memcmp(magic.data(), kMagic, 4) != 0) {
        throw CorruptError("not an index file (bad magic)");
    }
    if (const std::uint32_t version = header.u32(); version != kFormatVersion) {
        throw VersionError("unsupported index format version " +
                           std::to_string(version));
    }
    const std::uint64_t meta_len = header.u64();
    const std::string_view meta = header.bytes(meta_len);
    const std::uint64_t seq_len = header.u64();
    const std::string_view seq_bytes = header.bytes(seq_len);
    const std::uint64_t paa_len = header.u64();
    const std::string_view paa_bytes = header.bytes(paa_len);
    const std::uint64_t tree_len = header.u64();
    const std::string_view tree_bytes = header.bytes(tree_len);
    if (header.remaining() < 4) {
        throw TruncatedError("index file is missing its checksum trailer");
    }
    if (header.remaining() > 4) {
        throw CorruptError("index file has trailing bytes");
    }
    const std::uint32_t stored_crc = header.u32();
    if (crc_of(file.data(), file.size() - 4) != stored_crc) {
        throw ChecksumError("index file checksum mismatch");
    }

    try {
        const std::size_t hash_at = meta.rfind("params_hash=");
        if (hash_at == std::string_view::npos) {
            throw CorruptError("metadata is missing key: params_hash");
        }
        const auto kv = parse_metadata(meta);
        const std::string_view body = meta.substr(0, hash_at);
        if (hash_line(body) !=
            "params_hash=" + require_key(kv, "params_hash") + "\n") {
            throw CorruptError("metadata parameter hash mismatch");
        }

        IndexConfig config;
        config.band_radius =
            static_cast<std::size_t>(parse_u64_text(require_key(kv, "band_radius")));
        config.n_paa =
            static_cast<std::size_t>(parse_u64_text(require_key(kv, "n_paa")));
        config.node_capacity = static_cast<std::size_t>(
            parse_u64_text(require_key(kv, "node_capacity")));
        config.pad_value = std::stod(require_key(kv, "pad_value"));
        config.keogh_filter =
            parse_u64_text(require_key(kv, "keogh_filter")) != 0;
        const std::size_t lmax =
            static_cast<std::size_t>(parse_u64_text(require_key(kv, "lmax")));
        const std::size_t entry_count = static_cast<std::size_t>(
            parse_u64_text(require_key(kv, "entry_count")));
        config.lmax = lmax;
        if (config.n_paa == 0 || lmax % config.n_paa != 0) {
            throw CorruptError("metadata lmax is not divisible by n_paa");
        }
        if (entry_count == 0) {
            throw CorruptError("index has no entries");
        }

        Reader seq_reader(seq_bytes.data(), seq_bytes.size());
        std::vector<TimeSeries> store;
        store.reserve(entry_count);
        for (std::size_t k = 0; k < entry_count; ++k) {
            TimeSeries seq;
            seq.id = seq_reader.u64();
            const std::uint32_t len = seq_reader.u32();
            if (len == 0 || len >= lmax) {
                throw CorruptError("stored sequence length out of range");
            }
            seq.values.reserve(len);
            for (std::uint32_t i = 0; i < len; ++i) {
                seq.values.push_back(seq_reader.f64());
            }
            store.push_back(std::move(seq));
        }
        if (seq_reader.remaining() != 0) {
            throw CorruptError("sequence table has trailing bytes");
        }

        Reader paa_reader(paa_bytes.data(), paa_bytes.size());
        std::vector<PaaVector> paa;
        paa.reserve(entry_count);
        for (std::size_t k = 0; k < entry_count; ++k) {
            PaaVector vec;
            vec.lmax = lmax;
            vec.coords.reserve(config.n_paa);
            for (std::size_t d = 0; d < config.n_paa; ++d) {
                vec.coords.push_back(paa_reader.f64());
            }
            paa.push_back(std::move(vec));
        }
        if (paa_reader.remaining() != 0) {
            throw CorruptError("paa table has trailing bytes");
        }

        const ExtensionParams params{lmax, config.pad_value};
        for (std::size_t k = 0; k < entry_count; ++k) {
            const PaaVector expect =
                paa_transform(extend(store[k], params), config.n_paa);
            if (expect.coords != paa[k].coords) {
                throw CorruptError("paa table does not match the sequences");
            }
        }

        Reader tree_reader(tree_bytes.data(), tree_bytes.size());
        std::size_t entry_total = 0;
        RTreeNode root =
            read_node(tree_reader, 0, config.n_paa, entry_total);
        if (entry_total != entry_count) {
            throw CorruptError("tree entry count disagrees with metadata");
        }
        std::unordered_map<std::uint64_t, bool> seen;
        seen.reserve(entry_count);
        for (const auto& seq : store) seen.emplace(seq.id, false);
        const auto check_leaves = [&seen](const RTreeNode& node,
                                          const auto& self) -> void {
            for (std::uint64_t id : node.entries) {
                const auto it = seen.find(id);
                if (it == seen.end() || it->second) {
                    throw CorruptError("tree leaf ids do not match the store");
                }
                it->second = true;
            }
            for (const auto& child : node.children) self(child, self);
        };
        check_leaves(root, check_leaves);

        return DtwIndex(std::move(config), lmax, std::move(store),
                        std::move(paa), std::move(root));
    } catch (const TruncatedError& e) {
        throw CorruptError(std::string("index sections are inconsistent: ") +
                           e.what());
    } catch (const IndexIoError&) {
        throw;
    } catch (const std::exception& e) {
        throw CorruptError(std::string("malformed index content: ") + e.what());
    }
}

}  // namespace dtwidx
