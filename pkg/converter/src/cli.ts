#!/usr/bin/env node
/**
 * Usage: hsic-convert <manifest.json> [...more manifests]
 *
 * Paths inside each manifest are resolved relative to the manifest file.
 * Prints one manifest echo (JSON) per scene to stdout.
 */

import * as fs from "fs";
import * as path from "path";

import { convert } from "./convert";
import { parseManifest } from "./manifest";

function run(argv: string[]): number {
    const manifests = argv.filter((a) => !a.startsWith("-"));
    if (manifests.length === 0 || argv.includes("--help") || argv.includes("-h")) {
        process.stderr.write("usage: hsic-convert <manifest.json> [...more manifests]\n");
        return manifests.length === 0 ? 2 : 0;
    }
    for (const file of manifests) {
        try {
            const manifest = parseManifest(fs.readFileSync(file, "utf8"));
            const echo = convert(manifest, path.dirname(path.resolve(file)));
            process.stdout.write(JSON.stringify(echo, null, 2) + "\n");
        } catch (err) {
            process.stderr.write(`error: ${file}: ${(err as Error).message}\n`);
            return 1;
        }
    }
    return 0;
}

process.exit(run(process.argv.slice(2)));
