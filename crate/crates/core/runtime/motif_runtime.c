#define _DEFAULT_SOURCE
#include "motif_runtime.h"

#include <fcntl.h>
#include <signal.h>
#include <stdlib.h>
#include <string.h>
#include <sys/mman.h>
#include <unistd.h>

#define MOTIF_MAP_SIZE 65536

static unsigned char *buffer;
static size_t length;
static size_t position;

static int log_fd = -2;

static unsigned char fallback_map[MOTIF_MAP_SIZE];
static unsigned char *cov_map;
static uint16_t prev_loc;

static uint64_t lcg_state;

static unsigned char lcg_next(void)
{
    lcg_state = lcg_state * 6364136223846793005ULL + 1442695040888963407ULL;
    return (unsigned char)(lcg_state >> 56);
}

void load_file(const char *path, size_t needed)
{
    FILE *f = path ? fopen(path, "rb") : NULL;
    size_t size = 0, cap;
    const char *seed;

    if (!f)
        _exit(MOTIF_EXIT_BAD_INPUT);
    if (fseek(f, 0, SEEK_END) == 0) {
        long end = ftell(f);
        size = end > 0 ? (size_t)end : 0;
        rewind(f);
    }
    cap = size > needed ? size : needed;
    buffer = malloc(cap ? cap : 1);
    if (!buffer || fread(buffer, 1, size, f) != size)
        _exit(MOTIF_EXIT_BAD_INPUT);
    fclose(f);

    seed = getenv("MOTIF_RAND_SEED");
    lcg_state = seed ? strtoull(seed, NULL, 0) : 0;
    for (length = size; length < needed; length++)
        buffer[length] = lcg_next();
    position = 0;
}

void get_value(void *dst, size_t n)
{
    if (n == 0)
        return;
    if (position + n > length) {
        /* reads past the loaded size are zero-filled */
        size_t avail = position < length ? length - position : 0;
        memcpy(dst, buffer + position, avail);
        memset((unsigned char *)dst + avail, 0, n - avail);
        position = length;
        return;
    }
    memcpy(dst, buffer + position, n);
    position += n;
}

void seek_data_index(size_t i)
{
    position = i <= length ? i : length;
}

int compare_value(const void *a, const void *b, size_t n)
{
    return n == 0 ? 0 : memcmp(a, b, n) != 0;
}

static void open_log(void)
{
    const char *path;

    if (log_fd != -2)
        return;
    path = getenv("MOTIF_LOG_FILE");
    log_fd = path ? open(path, O_WRONLY | O_CREAT | O_APPEND, 0644) : STDERR_FILENO;
    if (log_fd < 0)
        log_fd = STDERR_FILENO;
}

void motif_log_to_stderr(void)
{
    log_fd = STDERR_FILENO;
}

void motif_checkpoint(const char *token)
{
    char line[64];
    size_t n = strlen(token);

    open_log();
    if (n > sizeof(line) - 1)
        n = sizeof(line) - 1;
    memcpy(line, token, n);
    line[n] = '\n';
    if (write(log_fd, line, n + 1) < 0)
        return;
}

void safe_abort(void)
{
    fflush(stdout);
    fflush(stderr);
    if (cov_map && cov_map != fallback_map)
        msync(cov_map, MOTIF_MAP_SIZE, MS_SYNC);
    abort();
}

void printf_struct(const char *label, const void *p, size_t n)
{
    const unsigned char *b = p;
    size_t i;

    printf("%s", label);
    for (i = 0; i < n; i++)
        printf("%s%02x", i ? " " : "", b[i]);
    printf("\n");
}

static void map_coverage(void)
{
    const char *path = getenv("MOTIF_COV_FILE");
    int fd;
    void *m;

    cov_map = fallback_map;
    if (!path)
        return;
    fd = open(path, O_RDWR);
    if (fd < 0)
        return;
    m = mmap(NULL, MOTIF_MAP_SIZE, PROT_READ | PROT_WRITE, MAP_SHARED, fd, 0);
    close(fd);
    if (m != MAP_FAILED)
        cov_map = m;
}

void __motif_cov(uint16_t id)
{
    uint16_t idx;

    if (!cov_map)
        map_coverage();
    idx = id ^ prev_loc;
    if (cov_map[idx] != 255)
        cov_map[idx]++;
    prev_loc = id >> 1;
}
