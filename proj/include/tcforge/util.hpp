#pragma once

#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <future>
#include <mutex>
#include <queue>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace tcforge {

namespace fs = std::filesystem;

std::string sha256_hex(std::string_view data);

std::string read_file(const fs::path& path);
void write_file(const fs::path& path, std::string_view data);

/// Splits on runs of ASCII whitespace; no empty tokens.
std::vector<std::string> split_ws(std::string_view text);
std::vector<std::string> split_lines(std::string_view text);
std::string trim(std::string_view text);
std::string to_lower(std::string_view text);
bool contains_ci(std::string_view haystack, std::string_view needle);

std::string iso8601_utc_now();

/// "test01" for (1, 25); width grows with the suite size past 99.
std::string test_stem(int index, int total);
int name_pad_width(int total);

/// Fixed-size pool; submit() returns a future. Destruction joins workers.
class ThreadPool {
public:
    explicit ThreadPool(unsigned workers);
    ~ThreadPool();

    ThreadPool(const ThreadPool&) = delete;
    ThreadPool& operator=(const ThreadPool&) = delete;

    template <typename F>
    auto submit(F&& fn) -> std::future<std::invoke_result_t<F>> {
        using R = std::invoke_result_t<F>;
        auto task = std::make_shared<std::packaged_task<R()>>(std::forward<F>(fn));
        std::future<R> fut = task->get_future();
        {
            std::lock_guard lock(mutex_);
            jobs_.push([task] { (*task)(); });
        }
        cv_.notify_one();
        return fut;
    }

private:
    void worker_loop();

    std::vector<std::thread> threads_;
    std::queue<std::function<void()>> jobs_;
    std::mutex mutex_;
    std::condition_variable cv_;
    bool stop_ = false;
};

} // namespace tcforge
