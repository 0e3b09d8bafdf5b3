from purcell_notch.cli import main

main()
